#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qtsim/indexing.hpp"
#include "qtsim/state.hpp"

namespace qtsim {

// Square matrix checked for unitarity on construction. Operators that carry
// an overall phase (e.g. -i sigma_y) are fine; non-unitary input is not.
class UnitaryOp {
public:
    explicit UnitaryOp(Eigen::MatrixXcd m, double tol = 1e-10)
        : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw std::invalid_argument("UnitaryOp: matrix must be square");
        const Eigen::MatrixXcd gram = m_.adjoint() * m_;
        const double err =
            (gram - Eigen::MatrixXcd::Identity(m_.rows(), m_.cols()))
                .cwiseAbs()
                .maxCoeff();
        if (err > tol)
            throw std::invalid_argument(
                "UnitaryOp: matrix is not unitary (deviation " +
                std::to_string(err) + ")");
    }

    static UnitaryOp identity(int dim) {
        return UnitaryOp(Eigen::MatrixXcd::Identity(dim, dim));
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    cplx operator()(int r, int c) const { return m_(r, c); }

    UnitaryOp adjoint() const { return UnitaryOp(m_.adjoint()); }

    // Multiply by a unit-modulus phase; keeps unitarity.
    UnitaryOp scaled(cplx phase) const { return UnitaryOp(phase * m_); }

private:
    Eigen::MatrixXcd m_;
};

inline UnitaryOp pauli_x() {
    Eigen::MatrixXcd m(2, 2);
    m << 0, 1, 1, 0;
    return UnitaryOp(m);
}

inline UnitaryOp pauli_y() {
    Eigen::MatrixXcd m(2, 2);
    m << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    return UnitaryOp(m);
}

inline UnitaryOp pauli_z() {
    Eigen::MatrixXcd m(2, 2);
    m << 1, 0, 0, -1;
    return UnitaryOp(m);
}

// Apply u to the listed subsystems (in the given order) and leave the rest
// alone. u.dim() must equal the product of the target dimensions.
inline StateVector apply_unitary(const StateVector& psi, const UnitaryOp& u,
                                 const std::vector<int>& targets) {
    const auto ix = detail::make_indexer(psi.layout(), targets);
    if (u.dim() != ix.block_dim)
        throw std::invalid_argument(
            "apply_unitary: operator dimension does not match targets");

    std::vector<cplx> out(psi.amps());
    std::vector<cplx> block(ix.block_dim);
    for (int base : ix.bases) {
        for (int m = 0; m < ix.block_dim; ++m)
            block[m] = psi.amps()[base + ix.offsets[m]];
        for (int r = 0; r < ix.block_dim; ++r) {
            cplx acc(0.0, 0.0);
            for (int c = 0; c < ix.block_dim; ++c) acc += u(r, c) * block[c];
            out[base + ix.offsets[r]] = acc;
        }
    }
    return StateVector(psi.layout(), std::move(out));
}

}  // namespace qtsim
