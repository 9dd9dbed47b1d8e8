#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qtsim/beamsplitter.hpp"
#include "qtsim/fock.hpp"
#include "qtsim/measure.hpp"
#include "qtsim/rng.hpp"
#include "qtsim/state.hpp"
#include "qtsim/unitary.hpp"

namespace qtsim {

// Photon counts observed at the two detectors: d1 watches the input rail
// after the mixing splitter, d2 watches the ancilla rail.
struct DetectionPattern {
    int d1 = 0;
    int d2 = 0;
    bool operator==(const DetectionPattern& o) const {
        return d1 == o.d1 && d2 == o.d2;
    }
};

struct ScissorsParams {
    int dim = 8;                 // per-mode Fock truncation
    BeamSplitterSpec splitter;   // used for both splitters
};

struct ScissorsResult {
    DetectionPattern pattern;
    bool success;               // exactly one count, on either detector
    double herald_probability;  // Born probability of the observed pattern
    bool phase_flipped;         // count landed on d2: output carries a sign
                                // flip on |1> relative to the input
    FockVector output;          // two-level output state (vacuum on failure)
};

// Heralded single-photon truncation device. Three modes: the input state
// enters mode 0; an ancilla photon enters mode 1 and vacuum enters mode 2 of
// an entangling splitter; mode 1 then mixes with the input on a second
// splitter and both of those modes hit photon counters. Counting exactly one
// photon heralds the projection of the input onto span{|0>, |1>} appearing
// on mode 2.
//
// The session precomputes the (input-dependent) pre-detection state so that
// repeated sampled runs cost one uniform draw plus a d-length projection.
class ScissorsSession {
public:
    ScissorsSession(const FockVector& input, const ScissorsParams& params)
        : dim_(params.dim),
          spec_(params.splitter),
          state_(prepare(input, params)) {
        probs_.resize(dim_ * dim_, 0.0);
        // Detection of (n0, n1) keeps every mode-2 amplitude: bin |amps|^2
        // over the first two modes. This is the Born rule for the product
        // number basis.
        const auto& amps = state_.amps();
        for (int i = 0; i < state_.dim(); ++i)
            probs_[i / dim_] += std::norm(amps[i]);
    }

    const std::vector<double>& pattern_probs() const { return probs_; }

    double pattern_prob(DetectionPattern p) const {
        check_pattern(p);
        return probs_[p.d1 * dim_ + p.d2];
    }

    ScissorsResult run(RngStream& rng) const {
        const int k = sample_index(probs_, rng);
        return conditional(DetectionPattern{k / dim_, k % dim_});
    }

    ScissorsResult forced(DetectionPattern p) const {
        check_pattern(p);
        if (probs_[p.d1 * dim_ + p.d2] < 1e-24)
            throw std::runtime_error(
                "scissors: forced pattern has zero probability");
        return conditional(p);
    }

private:
    static StateVector prepare(const FockVector& input,
                               const ScissorsParams& params) {
        if (params.dim < 3)
            throw std::invalid_argument(
                "scissors: need dim >= 3 for the ancilla photon plus "
                "headroom");
        const int top = input.highest_occupied();
        if (top + 2 > params.dim)
            throw std::invalid_argument(
                "scissors: truncation dim " + std::to_string(params.dim) +
                " cannot hold photon number " + std::to_string(top) +
                " through the splitters (need >= " + std::to_string(top + 2) +
                ")");

        const FockVector in = input.embedded(params.dim);
        const StateVector joint =
            tensor(tensor(in.as_state(),
                          FockVector::single_photon(params.dim).as_state()),
                   FockVector::vacuum(params.dim).as_state());
        const UnitaryOp bs = beamsplitter_unitary(params.splitter, params.dim);
        // Entangle ancilla modes (1,2) first, then mix the input on (0,1).
        const StateVector after_bs2 = apply_unitary(joint, bs, {1, 2});
        return apply_unitary(after_bs2, bs, {0, 1});
    }

    void check_pattern(DetectionPattern p) const {
        if (p.d1 < 0 || p.d2 < 0 || p.d1 >= dim_ || p.d2 >= dim_)
            throw std::out_of_range("scissors: pattern out of range");
    }

    // Device constant: the phase a herald pattern imprints on the output,
    // independent of the input. One count on d1 means the surviving paths
    // took (ancilla: transmit, then reflect into d1) for |0> and (input:
    // transmit; ancilla: reflect to output) for |1>, both carrying
    // i e^{i phi}; one count on d2 means both paths transmitted twice except
    // the double reflection on |1>, leaving phase +1 and a relative sign.
    cplx herald_phase(DetectionPattern p) const {
        if (p.d1 == 1 && p.d2 == 0)
            return cplx(0.0, 1.0) * cplx(std::cos(spec_.phi), std::sin(spec_.phi));
        return cplx(1.0, 0.0);
    }

    ScissorsResult conditional(DetectionPattern p) const {
        const double prob = probs_[p.d1 * dim_ + p.d2];
        const bool success = (p.d1 + p.d2 == 1);
        if (!success)
            return ScissorsResult{p, false, prob, false,
                                  FockVector::vacuum(2)};

        // Mode-2 amplitudes conditioned on the counts; construction keeps
        // mode 2 inside {|0>, |1>}, so anything above is a hard error.
        const int base = (p.d1 * dim_ + p.d2) * dim_;
        const auto& amps = state_.amps();
        for (int n = 2; n < dim_; ++n)
            if (std::abs(amps[base + n]) > 1e-12)
                throw std::runtime_error(
                    "scissors: heralded output leaked above photon number 1");

        const cplx h = herald_phase(p);
        return ScissorsResult{
            p, true, prob, p.d2 == 1,
            FockVector(2, {amps[base] / h, amps[base + 1] / h})};
    }

    int dim_;
    BeamSplitterSpec spec_;
    StateVector state_;
    std::vector<double> probs_;
};

// Single sampled run of the truncation device.
inline ScissorsResult scissors_run(const FockVector& input,
                                   const ScissorsParams& params,
                                   RngStream& rng) {
    return ScissorsSession(input, params).run(rng);
}

// Deterministic variant: condition on a chosen detection pattern.
inline ScissorsResult scissors_run_forced(const FockVector& input,
                                          const ScissorsParams& params,
                                          DetectionPattern pattern) {
    return ScissorsSession(input, params).forced(pattern);
}

// Full detection-pattern distribution, ordered by (d1, d2).
inline std::vector<std::pair<DetectionPattern, double>> herald_probabilities(
    const FockVector& input, const ScissorsParams& params) {
    const ScissorsSession session(input, params);
    std::vector<std::pair<DetectionPattern, double>> out;
    out.reserve(session.pattern_probs().size());
    for (int d1 = 0; d1 < params.dim; ++d1)
        for (int d2 = 0; d2 < params.dim; ++d2)
            out.push_back({DetectionPattern{d1, d2},
                           session.pattern_prob(DetectionPattern{d1, d2})});
    return out;
}

}  // namespace qtsim
