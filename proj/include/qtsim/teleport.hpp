#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qtsim/bell.hpp"
#include "qtsim/measure.hpp"
#include "qtsim/rng.hpp"
#include "qtsim/state.hpp"
#include "qtsim/unitary.hpp"

namespace qtsim {

namespace detail {

inline void check_single_qubit(const StateVector& psi, const char* who) {
    if (psi.layout().size() != 1 || psi.layout().dim(0) != 2)
        throw std::invalid_argument(std::string(who) +
                                    ": expected a single qubit state");
}

// Branch map for shared pair S and measurement outcome X: projecting
// qubits (1,2) of in (x) S onto X leaves qubit 3 in M in with amplitude 1/2,
// where M[k,m] = 2 sum_j conj(X[m,j]) S[j,k]. M is unitary because every
// Bell projection of a maximally entangled pair has probability exactly 1/4.
inline Eigen::MatrixXcd branch_map(BellOutcome outcome, BellOutcome shared) {
    const StateVector x = bell_state(outcome);
    const StateVector s = bell_state(shared);
    const SubsystemLayout pair({2, 2});
    Eigen::MatrixXcd m(2, 2);
    for (int k = 0; k < 2; ++k)
        for (int in_digit = 0; in_digit < 2; ++in_digit) {
            cplx acc(0.0, 0.0);
            for (int j = 0; j < 2; ++j)
                acc += std::conj(x[pair.index_of({in_digit, j})]) *
                       s[pair.index_of({j, k})];
            m(k, in_digit) = 2.0 * acc;
        }
    return m;
}

}  // namespace detail

// Result of expanding in (x) shared over the Bell basis of the first two
// qubits. The expansion regroups as
//   in (x) shared = global_phase * sum_X branch_weight * bell(X) (x) branch[X]
// exactly; the branches are the conventional signed conditional states (the
// regrouping's overall minus sign is pulled out into global_phase so the
// correction table below maps every branch back to the input with + sign).
struct BellDecomposition {
    cplx global_phase;
    double branch_weight;
    std::array<StateVector, 4> branch;
};

inline BellDecomposition bell_decompose(const StateVector& input,
                                        BellOutcome shared = BellOutcome::A) {
    detail::check_single_qubit(input, "bell_decompose");
    std::array<StateVector, 4> branches = {
        StateVector::single_qubit(1, 0), StateVector::single_qubit(1, 0),
        StateVector::single_qubit(1, 0), StateVector::single_qubit(1, 0)};
    for (BellOutcome x : kBellOutcomes) {
        const Eigen::MatrixXcd m = detail::branch_map(x, shared);
        const cplx a = input[0], b = input[1];
        // branch = -(M in): unit norm by unitarity of M.
        branches[bell_index(x)] = StateVector::single_qubit(
            -(m(0, 0) * a + m(0, 1) * b), -(m(1, 0) * a + m(1, 1) * b));
    }
    return BellDecomposition{cplx(-1.0, 0.0), 0.5, std::move(branches)};
}

// Bob's correction for each measurement outcome when the shared pair is the
// singlet (label A): identity, sigma_z, -sigma_x, -i sigma_y. Applied to the
// decomposition's branch states these reproduce the input exactly, sign
// included.
inline UnitaryOp correction(BellOutcome outcome) {
    Eigen::MatrixXcd m(2, 2);
    switch (outcome) {
        case BellOutcome::A:
            m << 1, 0, 0, 1;
            break;
        case BellOutcome::B:
            m << 1, 0, 0, -1;
            break;
        case BellOutcome::C:
            m << 0, -1, -1, 0;
            break;
        case BellOutcome::D:
            m << 0, -1, 1, 0;
            break;
    }
    return UnitaryOp(std::move(m));
}

// Correction for an arbitrary shared Bell pair: the inverse of the branch
// map with the branch sign convention folded in. Reduces to the table above
// for shared = A.
inline UnitaryOp correction(BellOutcome outcome, BellOutcome shared) {
    return UnitaryOp(Eigen::MatrixXcd(
        -detail::branch_map(outcome, shared).adjoint()));
}

struct TeleportResult {
    BellOutcome outcome;
    std::pair<int, int> message;    // two classical bits sent to Bob
    double probability;             // Born probability of the outcome (1/4)
    StateVector post_measurement;   // all three qubits after the measurement
    StateVector bob_conditional;    // Bob's qubit before correction
    StateVector bob_state;          // after correction; equals the input
    double fidelity_to_input;
};

namespace detail {

inline TeleportResult finish_teleport(const StateVector& input,
                                      BellOutcome outcome, double probability,
                                      const StateVector& post,
                                      BellOutcome shared) {
    // post = bell(outcome) (x) (M in); flip to the branch convention so the
    // published correction table applies.
    const StateVector inherited = factor_out(post, {0, 1}, bell_state(outcome));
    const StateVector conditional =
        StateVector::single_qubit(-inherited[0], -inherited[1]);
    const StateVector bob =
        apply_unitary(conditional, correction(outcome, shared), {0});
    return TeleportResult{outcome,
                          to_bits(outcome),
                          probability,
                          post,
                          conditional,
                          bob,
                          fidelity(bob, input)};
}

}  // namespace detail

// One round of single-qubit teleportation over the given shared Bell pair:
// joint state preparation, Bell measurement of (input, Alice's half), and
// Bob's conditional correction.
inline TeleportResult teleport(const StateVector& input, RngStream& rng,
                               BellOutcome shared = BellOutcome::A) {
    detail::check_single_qubit(input, "teleport");
    const StateVector joint = tensor(input, bell_state(shared));
    const MeasurementResult m =
        measure_projective(joint, {0, 1}, bell_basis(), rng);
    return detail::finish_teleport(input, bell_from_index(m.outcome),
                                   m.probability, m.post, shared);
}

// Same pipeline with the measurement outcome fixed instead of sampled; used
// to exercise all four correction branches deterministically.
inline TeleportResult teleport_forced(const StateVector& input,
                                      BellOutcome outcome,
                                      BellOutcome shared = BellOutcome::A) {
    detail::check_single_qubit(input, "teleport_forced");
    const StateVector joint = tensor(input, bell_state(shared));
    const auto probs = born_probabilities(joint, {0, 1}, bell_basis());
    const StateVector post =
        project_outcome(joint, {0, 1}, bell_basis(), bell_index(outcome));
    return detail::finish_teleport(input, outcome, probs[bell_index(outcome)],
                                   post, shared);
}

}  // namespace qtsim
