#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qtsim/unitary.hpp"

namespace qtsim {

// Lossless beam splitter in the symmetric convention: creation operators
// transform as
//   a+ -> cos(theta) a+ + i e^{-i phi} sin(theta) b+
//   b+ -> i e^{i phi} sin(theta) a+ + cos(theta) b+
// so every reflection picks up a factor i. theta = pi/4 is 50-50.
struct BeamSplitterSpec {
    double theta = 0.78539816339744830962;  // pi/4
    double phi = 0.0;
};

namespace detail {

// exp(A) by scaling-and-squaring on a plain Taylor series. Good to machine
// precision for the small photon-number blocks used here.
inline Eigen::MatrixXcd matrix_exp_taylor(Eigen::MatrixXcd a) {
    const int n = static_cast<int>(a.rows());
    double norm = 0.0;
    for (int r = 0; r < n; ++r) norm = std::max(norm, a.row(r).cwiseAbs().sum());
    int squarings = 0;
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    a /= double(1 << squarings);

    Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 1; k <= 24; ++k) {
        term = term * a / double(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

inline double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

inline double binomial(int n, int k) {
    return factorial(n) / (factorial(k) * factorial(n - k));
}

// x^n for unit-modulus x, exact at n = 0 and with no branch-cut surprises
// for negative n.
inline cplx unit_pow(cplx x, int n) {
    const cplx base = n >= 0 ? x : std::conj(x);
    cplx r(1.0, 0.0);
    for (int k = 0; k < (n >= 0 ? n : -n); ++k) r *= base;
    return r;
}

inline cplx i_pow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return cplx(1, 0);
        case 1: return cplx(0, 1);
        case 2: return cplx(-1, 0);
        default: return cplx(0, -1);
    }
}

}  // namespace detail

// Two-mode beam splitter unitary on a (dim x dim)-truncated Fock space,
// basis index n_a * dim + n_b. The operator is block-diagonal in total
// photon number N. Blocks that fit entirely below the truncation get exact
// closed-form entries (photon paths with binomial weights); blocks that the
// truncation cuts are the matrix exponential of the truncated generator
// i theta (e^{i phi} a+ b + e^{-i phi} a b+), which keeps them unitary on
// the truncated space.
inline UnitaryOp beamsplitter_unitary(const BeamSplitterSpec& spec, int dim) {
    if (dim < 2)
        throw std::invalid_argument("beamsplitter_unitary: dim must be >= 2");
    const double c = std::cos(spec.theta);
    const double s = std::sin(spec.theta);
    const cplx ephi(std::cos(spec.phi), std::sin(spec.phi));

    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);

    for (int total = 0; total <= 2 * (dim - 1); ++total) {
        // States |j, total - j> with both indices inside the truncation.
        std::vector<int> members;
        for (int j = 0; j <= total; ++j)
            if (j < dim && total - j < dim) members.push_back(j);
        const int bs = static_cast<int>(members.size());
        if (bs == 0) continue;

        Eigen::MatrixXcd block(bs, bs);
        if (total <= dim - 1) {
            // Complete block: sum over photon routings. Input |m, n>, output
            // |p, total - p>; j transmitted from mode a, k reflected into
            // mode a from mode b, j + k = p.
            for (int col = 0; col < bs; ++col) {
                const int m = members[col];
                const int n = total - m;
                for (int row = 0; row < bs; ++row) {
                    const int p = members[row];
                    cplx entry(0.0, 0.0);
                    for (int j = std::max(0, p - n); j <= std::min(m, p); ++j) {
                        const int k = p - j;
                        const int refl = (m - j) + k;  // photons reflected
                        cplx amp = detail::binomial(m, j) *
                                   detail::binomial(n, k) *
                                   std::pow(c, j + n - k) * std::pow(s, refl);
                        // i per reflection; e^{-i phi} for a->b, e^{+i phi}
                        // for b->a.
                        amp *= detail::i_pow(refl);
                        amp *= detail::unit_pow(ephi, k - (m - j));
                        entry += amp;
                    }
                    entry *= std::sqrt(detail::factorial(p) *
                                       detail::factorial(total - p) /
                                       (detail::factorial(m) *
                                        detail::factorial(n)));
                    block(row, col) = entry;
                }
            }
        } else {
            // Truncated block: exponentiate the generator restricted to it.
            Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(bs, bs);
            for (int col = 0; col < bs; ++col) {
                const int m = members[col];
                const int n = total - m;
                // e^{i phi} a+ b |m, n> = sqrt((m+1) n) |m+1, n-1>
                if (m + 1 < dim && n - 1 >= 0) {
                    const auto it = std::find(members.begin(), members.end(), m + 1);
                    if (it != members.end())
                        gen(static_cast<int>(it - members.begin()), col) +=
                            ephi * std::sqrt(double((m + 1) * n));
                }
                // e^{-i phi} a b+ |m, n> = sqrt(m (n+1)) |m-1, n+1>
                if (m - 1 >= 0 && n + 1 < dim) {
                    const auto it = std::find(members.begin(), members.end(), m - 1);
                    if (it != members.end())
                        gen(static_cast<int>(it - members.begin()), col) +=
                            std::conj(ephi) * std::sqrt(double(m * (n + 1)));
                }
            }
            block = detail::matrix_exp_taylor(cplx(0.0, spec.theta) * gen);
        }

        for (int row = 0; row < bs; ++row)
            for (int col = 0; col < bs; ++col) {
                const int r = members[row] * dim + (total - members[row]);
                const int cc = members[col] * dim + (total - members[col]);
                u(r, cc) = block(row, col);
            }
    }
    return UnitaryOp(std::move(u));
}

}  // namespace qtsim
