#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtsim/indexing.hpp"
#include "qtsim/rng.hpp"
#include "qtsim/state.hpp"

namespace qtsim {

namespace detail {

// Check that `basis` is a complete orthonormal basis for the target block.
inline void check_basis(const TargetIndexer& ix,
                        const std::vector<StateVector>& basis) {
    if (static_cast<int>(basis.size()) != ix.block_dim)
        throw std::invalid_argument(
            "measurement basis must span the target block (" +
            std::to_string(ix.block_dim) + " elements)");
    for (const StateVector& b : basis) {
        if (b.layout().dims() != ix.target_dims)
            throw std::invalid_argument(
                "measurement basis element has wrong layout");
    }
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = i; j < basis.size(); ++j) {
            const cplx g = inner(basis[i], basis[j]);
            const cplx want = (i == j) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
            if (std::abs(g - want) > 1e-10)
                throw std::invalid_argument(
                    "measurement basis is not orthonormal");
        }
}

}  // namespace detail

// Born probabilities of a projective measurement of the target subsystems in
// the given basis. The basis must be complete and orthonormal; probabilities
// then sum to 1 up to roundoff.
inline std::vector<double> born_probabilities(
    const StateVector& psi, const std::vector<int>& targets,
    const std::vector<StateVector>& basis) {
    const auto ix = detail::make_indexer(psi.layout(), targets);
    detail::check_basis(ix, basis);

    std::vector<double> probs(basis.size(), 0.0);
    for (size_t k = 0; k < basis.size(); ++k) {
        const auto& b = basis[k].amps();
        double p = 0.0;
        for (int base : ix.bases) {
            cplx overlap(0.0, 0.0);
            for (int m = 0; m < ix.block_dim; ++m)
                overlap += std::conj(b[m]) * psi.amps()[base + ix.offsets[m]];
            p += std::norm(overlap);
        }
        probs[k] = p;
    }
    return probs;
}

// Post-measurement state for outcome k: project the target block onto
// basis[k] and renormalize. Phases of the surviving amplitudes are inherited
// from psi, nothing is rephased. Throws if the outcome has (numerically)
// zero probability.
inline StateVector project_outcome(const StateVector& psi,
                                   const std::vector<int>& targets,
                                   const std::vector<StateVector>& basis,
                                   int outcome) {
    const auto ix = detail::make_indexer(psi.layout(), targets);
    detail::check_basis(ix, basis);
    if (outcome < 0 || outcome >= static_cast<int>(basis.size()))
        throw std::out_of_range("project_outcome: outcome out of range");

    const auto& b = basis[outcome].amps();
    std::vector<cplx> out(psi.dim(), cplx(0.0, 0.0));
    double p = 0.0;
    for (int base : ix.bases) {
        cplx overlap(0.0, 0.0);
        for (int m = 0; m < ix.block_dim; ++m)
            overlap += std::conj(b[m]) * psi.amps()[base + ix.offsets[m]];
        p += std::norm(overlap);
        for (int m = 0; m < ix.block_dim; ++m)
            out[base + ix.offsets[m]] = overlap * b[m];
    }
    if (p < 1e-24)
        throw std::runtime_error(
            "project_outcome: outcome has zero probability");
    return StateVector(psi.layout(), std::move(out));
}

// Draw an index from a probability vector using one uniform variate.
// Probabilities must be a distribution up to roundoff.
inline int sample_index(const std::vector<double>& probs, RngStream& rng) {
    if (probs.empty())
        throw std::invalid_argument("sample_index: empty distribution");
    double total = 0.0;
    for (double p : probs) {
        if (p < -1e-12)
            throw std::invalid_argument("sample_index: negative probability");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument(
            "sample_index: probabilities sum to " + std::to_string(total));
    const double u = rng.uniform() * total;
    double cum = 0.0;
    int last_positive = 0;
    for (size_t k = 0; k < probs.size(); ++k) {
        if (probs[k] > 0.0) last_positive = static_cast<int>(k);
        cum += probs[k];
        if (u < cum) return static_cast<int>(k);
    }
    return last_positive;  // u landed on the roundoff tail
}

struct MeasurementResult {
    int outcome;
    double probability;
    StateVector post;
};

// Projective measurement of the target subsystems in the given basis:
// Born-rule sampling plus state collapse, consuming one uniform draw.
inline MeasurementResult measure_projective(const StateVector& psi,
                                            const std::vector<int>& targets,
                                            const std::vector<StateVector>& basis,
                                            RngStream& rng) {
    const std::vector<double> probs = born_probabilities(psi, targets, basis);
    const int outcome = sample_index(probs, rng);
    return MeasurementResult{outcome, probs[outcome],
                             project_outcome(psi, targets, basis, outcome)};
}

// Given psi that factorizes as factor(targets) (x) chi(rest), recover chi
// with its phase inherited from psi. Throws if psi has no overlap with the
// factor. Used after a projective measurement to peel off the measured block.
inline StateVector factor_out(const StateVector& psi,
                              const std::vector<int>& targets,
                              const StateVector& factor) {
    const auto ix = detail::make_indexer(psi.layout(), targets);
    if (factor.layout().dims() != ix.target_dims)
        throw std::invalid_argument("factor_out: factor layout mismatch");

    std::vector<cplx> chi;
    chi.reserve(ix.bases.size());
    double n2 = 0.0;
    for (int base : ix.bases) {
        cplx overlap(0.0, 0.0);
        for (int m = 0; m < ix.block_dim; ++m)
            overlap +=
                std::conj(factor.amps()[m]) * psi.amps()[base + ix.offsets[m]];
        chi.push_back(overlap);
        n2 += std::norm(overlap);
    }
    if (n2 < 1e-24)
        throw std::runtime_error("factor_out: state has no such factor");
    return StateVector(
        SubsystemLayout(detail::complement_dims(psi.layout(), targets)),
        std::move(chi));
}

}  // namespace qtsim
