#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qtsim/layout.hpp"

namespace qtsim {

using cplx = std::complex<double>;

// Pure state of a composite system, always held normalized. Construction
// normalizes the given amplitudes and rejects vectors of (numerically) zero
// norm rather than guessing.
class StateVector {
public:
    StateVector(SubsystemLayout layout, std::vector<cplx> amps)
        : layout_(std::move(layout)), amps_(std::move(amps)) {
        if (static_cast<int>(amps_.size()) != layout_.total_dim())
            throw std::invalid_argument(
                "StateVector: amplitude count does not match layout");
        double n2 = 0.0;
        for (const cplx& a : amps_) n2 += std::norm(a);
        if (n2 < 1e-24)
            throw std::invalid_argument(
                "StateVector: cannot normalize a zero vector");
        const double inv = 1.0 / std::sqrt(n2);
        for (cplx& a : amps_) a *= inv;
    }

    static StateVector basis_state(SubsystemLayout layout, int index) {
        std::vector<cplx> amps(layout.total_dim(), cplx(0.0, 0.0));
        if (index < 0 || index >= layout.total_dim())
            throw std::out_of_range("basis_state: index out of range");
        amps[index] = cplx(1.0, 0.0);
        return StateVector(std::move(layout), std::move(amps));
    }

    static StateVector single_qubit(cplx a0, cplx a1) {
        return StateVector(SubsystemLayout({2}), {a0, a1});
    }

    const SubsystemLayout& layout() const { return layout_; }
    int dim() const { return layout_.total_dim(); }
    const std::vector<cplx>& amps() const { return amps_; }

    cplx operator[](int i) const {
        if (i < 0 || i >= dim())
            throw std::out_of_range("StateVector: index out of range");
        return amps_[i];
    }

    double norm() const {
        double n2 = 0.0;
        for (const cplx& a : amps_) n2 += std::norm(a);
        return std::sqrt(n2);
    }

private:
    SubsystemLayout layout_;
    std::vector<cplx> amps_;
};

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    std::vector<int> dims = a.layout().dims();
    dims.insert(dims.end(), b.layout().dims().begin(), b.layout().dims().end());
    std::vector<cplx> amps;
    amps.reserve(static_cast<size_t>(a.dim()) * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j) amps.push_back(a[i] * b[j]);
    return StateVector(SubsystemLayout(std::move(dims)), std::move(amps));
}

// <a|b>; requires matching layouts.
inline cplx inner(const StateVector& a, const StateVector& b) {
    if (a.layout() != b.layout())
        throw std::invalid_argument("inner: layout mismatch");
    cplx s(0.0, 0.0);
    for (int i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// |<a|b>|^2, the overlap probability between two pure states.
inline double fidelity(const StateVector& a, const StateVector& b) {
    return std::norm(inner(a, b));
}

// Largest entrywise amplitude difference. This is the strict comparator:
// it detects global-phase discrepancies that fidelity cannot see.
inline double max_abs_diff(const StateVector& a, const StateVector& b) {
    if (a.layout() != b.layout())
        throw std::invalid_argument("max_abs_diff: layout mismatch");
    double m = 0.0;
    for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline bool approx_equal(const StateVector& a, const StateVector& b,
                         double tol) {
    return max_abs_diff(a, b) <= tol;
}

}  // namespace qtsim
