#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qtsim/bell.hpp"
#include "qtsim/density.hpp"
#include "qtsim/measure.hpp"
#include "qtsim/rng.hpp"
#include "qtsim/state.hpp"
#include "qtsim/teleport.hpp"

namespace qtsim {

// Four qubits 1..4 prepared as two Bell pairs (1,4) and (2,3). Qubits are
// stored in label order, so the joint amplitude of |i1 i2 i3 i4> is
// pair14[i1 i4] * pair23[i2 i3].
inline StateVector swap_input_state(BellOutcome pair14, BellOutcome pair23) {
    const StateVector p14 = bell_state(pair14);
    const StateVector p23 = bell_state(pair23);
    const SubsystemLayout pair({2, 2});
    const SubsystemLayout lay({2, 2, 2, 2});
    std::vector<cplx> amps(16);
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 2; ++i2)
            for (int i3 = 0; i3 < 2; ++i3)
                for (int i4 = 0; i4 < 2; ++i4)
                    amps[lay.index_of({i1, i2, i3, i4})] =
                        p14[pair.index_of({i1, i4})] *
                        p23[pair.index_of({i2, i3})];
    return StateVector(lay, std::move(amps));
}

struct SwapResult {
    BellOutcome outcome;         // Bell measurement result on qubits (1,2)
    double probability;          // Born probability of that outcome (1/4)
    StateVector pair34;          // post-measurement state of qubits (3,4)
    BellOutcome pair34_label;    // the Bell state pair34 matches
    cplx pair34_phase;           // pair34 = pair34_phase * bell(pair34_label)
    double entanglement_check;   // larger eigenvalue of qubit 3's reduced
                                 // density matrix; 1/2 means maximally
                                 // entangled
};

namespace detail {

inline SwapResult finish_swap(BellOutcome outcome, double probability,
                              const StateVector& post) {
    const StateVector pair34 = factor_out(post, {0, 1}, bell_state(outcome));

    BellOutcome label = BellOutcome::A;
    cplx phase(0.0, 0.0);
    double best = -1.0;
    for (BellOutcome y : kBellOutcomes) {
        const cplx overlap = inner(bell_state(y), pair34);
        if (std::abs(overlap) > best) {
            best = std::abs(overlap);
            label = y;
            phase = overlap;
        }
    }
    if (std::abs(best - 1.0) > 1e-9)
        throw std::runtime_error(
            "entanglement_swap: projected pair is not a Bell state");

    const double ent =
        reduced_density(pair34, {0}).eigenvalues().maxCoeff();
    return SwapResult{outcome, probability, pair34, label, phase, ent};
}

}  // namespace detail

// Bell measurement of qubits (1,2) projects the never-interacted qubits
// (3,4) onto a Bell state.
inline SwapResult entanglement_swap(BellOutcome pair14, BellOutcome pair23,
                                    RngStream& rng) {
    const StateVector joint = swap_input_state(pair14, pair23);
    const MeasurementResult m =
        measure_projective(joint, {0, 1}, bell_basis(), rng);
    return detail::finish_swap(bell_from_index(m.outcome), m.probability,
                               m.post);
}

// Deterministic variant with the measurement outcome fixed.
inline SwapResult entanglement_swap_forced(BellOutcome pair14,
                                           BellOutcome pair23,
                                           BellOutcome outcome) {
    const StateVector joint = swap_input_state(pair14, pair23);
    const auto probs = born_probabilities(joint, {0, 1}, bell_basis());
    const StateVector post =
        project_outcome(joint, {0, 1}, bell_basis(), bell_index(outcome));
    return detail::finish_swap(outcome, probs[bell_index(outcome)], post);
}

// Exchange parity of a Bell state: -1 for the singlet, +1 for the rest.
inline double bell_exchange_parity(BellOutcome x) {
    return x == BellOutcome::A ? -1.0 : 1.0;
}

// Swapping is teleportation of qubit 2 (one half of pair (2,3)) through the
// shared pair (1,4): applying the teleport correction for the measured
// outcome to qubit 4 must turn pair (3,4) into bell(pair23) up to the
// predicted sign -parity(outcome) * parity(pair23). Returns true when that
// holds, amplitude-exactly within 1e-10, for all four outcomes.
inline bool swap_as_teleport_check(BellOutcome pair14, BellOutcome pair23) {
    for (BellOutcome x : kBellOutcomes) {
        const SwapResult r = entanglement_swap_forced(pair14, pair23, x);
        const StateVector corrected =
            apply_unitary(r.pair34, correction(x, pair14), {1});
        const double sign =
            -bell_exchange_parity(x) * bell_exchange_parity(pair23);
        const StateVector want = bell_state(pair23);
        double err = 0.0;
        for (int i = 0; i < 4; ++i)
            err = std::max(err, std::abs(corrected[i] - sign * want[i]));
        if (err > 1e-10) return false;
    }
    return true;
}

}  // namespace qtsim
