#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtsim/indexing.hpp"
#include "qtsim/state.hpp"

namespace qtsim {

// Mixed state. The constructor enforces the physical invariants instead of
// trusting callers: hermiticity and unit trace within 1e-10, and eigenvalues
// no more negative than -1e-9 (roundoff from partial traces lands well inside
// that).
class DensityMatrix {
public:
    DensityMatrix(SubsystemLayout layout, Eigen::MatrixXcd rho)
        : layout_(std::move(layout)), rho_(std::move(rho)) {
        const int n = layout_.total_dim();
        if (rho_.rows() != n || rho_.cols() != n)
            throw std::invalid_argument(
                "DensityMatrix: matrix does not match layout");
        const double herm_err = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
        if (herm_err > 1e-10)
            throw std::invalid_argument(
                "DensityMatrix: not hermitian (deviation " +
                std::to_string(herm_err) + ")");
        const double trace_err = std::abs(rho_.trace() - cplx(1.0, 0.0));
        if (trace_err > 1e-10)
            throw std::invalid_argument(
                "DensityMatrix: trace is not 1 (deviation " +
                std::to_string(trace_err) + ")");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_);
        if (es.eigenvalues().minCoeff() < -1e-9)
            throw std::invalid_argument(
                "DensityMatrix: negative eigenvalue " +
                std::to_string(es.eigenvalues().minCoeff()));
    }

    static DensityMatrix from_state(const StateVector& psi) {
        const int n = psi.dim();
        Eigen::MatrixXcd rho(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                rho(r, c) = psi[r] * std::conj(psi[c]);
        return DensityMatrix(psi.layout(), std::move(rho));
    }

    const SubsystemLayout& layout() const { return layout_; }
    int dim() const { return layout_.total_dim(); }
    const Eigen::MatrixXcd& matrix() const { return rho_; }
    cplx operator()(int r, int c) const { return rho_(r, c); }

    // Eigenvalues in ascending order; real by hermiticity.
    Eigen::VectorXd eigenvalues() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_);
        return es.eigenvalues();
    }

    double purity() const { return (rho_ * rho_).trace().real(); }

private:
    SubsystemLayout layout_;
    Eigen::MatrixXcd rho_;
};

// Trace out everything except the `keep` subsystems. `keep` must be strictly
// ascending so the result's subsystem order is unambiguous.
inline DensityMatrix reduced_density(const StateVector& psi,
                                     const std::vector<int>& keep) {
    for (size_t k = 1; k < keep.size(); ++k)
        if (keep[k] <= keep[k - 1])
            throw std::invalid_argument(
                "reduced_density: keep list must be strictly ascending");
    if (static_cast<int>(keep.size()) == psi.layout().size())
        return DensityMatrix::from_state(psi);

    // Indexer over the traced-out subsystems: kept digits live in `offsets`
    // space complement. Easier the other way around: index over kept
    // subsystems, sum |env> blocks.
    const auto ix = detail::make_indexer(psi.layout(), keep);
    const int k_dim = ix.block_dim;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(k_dim, k_dim);
    for (int base : ix.bases)
        for (int r = 0; r < k_dim; ++r)
            for (int c = 0; c < k_dim; ++c)
                rho(r, c) += psi.amps()[base + ix.offsets[r]] *
                             std::conj(psi.amps()[base + ix.offsets[c]]);

    std::vector<int> dims;
    for (int t : keep) dims.push_back(psi.layout().dim(t));
    return DensityMatrix(SubsystemLayout(std::move(dims)), std::move(rho));
}

}  // namespace qtsim
