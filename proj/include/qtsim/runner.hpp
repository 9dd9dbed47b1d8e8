#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qtsim/cavity.hpp"
#include "qtsim/config.hpp"
#include "qtsim/report.hpp"
#include "qtsim/rng.hpp"
#include "qtsim/scissors.hpp"
#include "qtsim/swap.hpp"
#include "qtsim/teleport.hpp"

namespace qtsim::cli {

// A module error that surfaced while running one trial; carries the index.
struct TrialError : std::runtime_error {
    TrialError(long trial_index, const std::string& what)
        : std::runtime_error("trial " + std::to_string(trial_index) + ": " +
                             what),
          trial(trial_index) {}
    long trial;
};

namespace detail {

// Runs fn(trial) exactly once per trial, fanning out across workers. Trials
// draw from per-trial substreams and write to per-trial slots, so the
// observable output is identical at every worker count. The lowest-index
// failure wins when several trials throw.
template <class Fn>
inline void for_each_trial(long trials, int workers, Fn&& fn) {
    if (workers <= 1 || trials == 1) {
        for (long t = 0; t < trials; ++t) {
            try {
                fn(t);
            } catch (const std::exception& e) {
                throw TrialError(t, e.what());
            }
        }
        return;
    }

    struct Failure {
        long trial;
        std::string what;
    };
    std::mutex mu;
    std::optional<Failure> failure;
    std::atomic<long> next{0};
    const int n = static_cast<int>(
        std::min<long>(workers, std::max<long>(trials, 1)));
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (int w = 0; w < n; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const long t = next.fetch_add(1);
                if (t >= trials) return;
                try {
                    fn(t);
                } catch (const std::exception& e) {
                    const std::lock_guard<std::mutex> lock(mu);
                    if (!failure || t < failure->trial)
                        failure = Failure{t, e.what()};
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) throw TrialError(failure->trial, failure->what);
}

inline std::string input_echo(const ExperimentConfig& cfg) {
    if (cfg.random_input) return "random";
    std::string out;
    for (size_t i = 0; i < cfg.input_amps.size(); ++i) {
        if (i) out += ",";
        out += fmt_complex(cfg.input_amps[i]);
    }
    return out;
}

inline std::vector<std::pair<std::string, std::string>> common_header(
    const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> h;
    h.emplace_back("protocol", protocol_name(cfg.protocol));
    h.emplace_back("trials", std::to_string(cfg.trials));
    h.emplace_back("seed", std::to_string(cfg.seed));
    return h;
}

inline StateVector random_qubit(RngStream& rng) {
    return StateVector::single_qubit(cplx(rng.normal(), rng.normal()),
                                     cplx(rng.normal(), rng.normal()));
}

inline BellOutcome random_bell(RngStream& rng) {
    const int k = std::min(3, static_cast<int>(rng.uniform() * 4.0));
    return bell_from_index(k);
}

inline RunOutput run_teleport(const ExperimentConfig& cfg) {
    RunOutput out;
    out.header = common_header(cfg);
    out.header.emplace_back("input", input_echo(cfg));
    if (cfg.input_was_normalized) out.header.emplace_back("input_normalized", "1");
    out.header.emplace_back("shared", std::string(1, bell_label(cfg.shared)));

    out.records.resize(cfg.trials);
    std::vector<double> fid(cfg.trials);
    std::vector<int> outcome(cfg.trials);
    const std::optional<StateVector> fixed =
        cfg.random_input ? std::nullopt
                         : std::optional<StateVector>(StateVector::single_qubit(
                               cfg.input_amps[0], cfg.input_amps[1]));

    for_each_trial(cfg.trials, cfg.workers, [&](long t) {
        RngStream rng(cfg.seed, 1 + static_cast<std::uint64_t>(t));
        const StateVector input = fixed ? *fixed : random_qubit(rng);
        const TeleportResult r = teleport(input, rng, cfg.shared);
        outcome[t] = bell_index(r.outcome);
        fid[t] = r.fidelity_to_input;
        out.records[t].fields = {
            {"trial", std::to_string(t)},
            {"outcome", std::string(1, bell_label(r.outcome))},
            {"bits", std::to_string(r.message.first) +
                         std::to_string(r.message.second)},
            {"success", "1"},
            {"probability", fmt_g(r.probability)},
            {"fidelity", fmt_g(r.fidelity_to_input)},
        };
    });

    long counts[4] = {0, 0, 0, 0};
    double sum = 0.0, lo = 1.0;
    for (long t = 0; t < cfg.trials; ++t) {
        ++counts[outcome[t]];
        sum += fid[t];
        lo = std::min(lo, fid[t]);
    }
    out.summary = {
        {"protocol", protocol_name(cfg.protocol)},
        {"trials", std::to_string(cfg.trials)},
        {"success_rate", "1"},
        {"mean_fidelity", fmt_g(sum / double(cfg.trials))},
        {"min_fidelity", fmt_g(lo)},
        {"outcome_A", std::to_string(counts[0])},
        {"outcome_B", std::to_string(counts[1])},
        {"outcome_C", std::to_string(counts[2])},
        {"outcome_D", std::to_string(counts[3])},
    };
    return out;
}

inline RunOutput run_swap(const ExperimentConfig& cfg) {
    RunOutput out;
    out.header = common_header(cfg);
    out.header.emplace_back(
        "pair14",
        cfg.pair14 ? std::string(1, bell_label(*cfg.pair14)) : "random");
    out.header.emplace_back(
        "pair23",
        cfg.pair23 ? std::string(1, bell_label(*cfg.pair23)) : "random");

    out.records.resize(cfg.trials);
    std::vector<double> fid(cfg.trials), ent(cfg.trials);
    std::vector<int> outcome(cfg.trials);

    for_each_trial(cfg.trials, cfg.workers, [&](long t) {
        RngStream rng(cfg.seed, 1 + static_cast<std::uint64_t>(t));
        const BellOutcome p14 = cfg.pair14 ? *cfg.pair14 : random_bell(rng);
        const BellOutcome p23 = cfg.pair23 ? *cfg.pair23 : random_bell(rng);
        const SwapResult r = entanglement_swap(p14, p23, rng);
        const double f =
            std::norm(inner(bell_state(r.pair34_label), r.pair34));
        outcome[t] = bell_index(r.outcome);
        fid[t] = f;
        ent[t] = r.entanglement_check;
        out.records[t].fields = {
            {"trial", std::to_string(t)},
            {"pair14", std::string(1, bell_label(p14))},
            {"pair23", std::string(1, bell_label(p23))},
            {"outcome", std::string(1, bell_label(r.outcome))},
            {"pair34", std::string(1, bell_label(r.pair34_label))},
            {"phase", fmt_g(r.pair34_phase.real())},
            {"success", "1"},
            {"probability", fmt_g(r.probability)},
            {"fidelity", fmt_g(f)},
            {"entanglement", fmt_g(r.entanglement_check)},
        };
    });

    long counts[4] = {0, 0, 0, 0};
    double fsum = 0.0, esum = 0.0;
    for (long t = 0; t < cfg.trials; ++t) {
        ++counts[outcome[t]];
        fsum += fid[t];
        esum += ent[t];
    }
    out.summary = {
        {"protocol", protocol_name(cfg.protocol)},
        {"trials", std::to_string(cfg.trials)},
        {"success_rate", "1"},
        {"mean_fidelity", fmt_g(fsum / double(cfg.trials))},
        {"mean_entanglement", fmt_g(esum / double(cfg.trials))},
        {"outcome_A", std::to_string(counts[0])},
        {"outcome_B", std::to_string(counts[1])},
        {"outcome_C", std::to_string(counts[2])},
        {"outcome_D", std::to_string(counts[3])},
    };
    return out;
}

inline RunOutput run_scissors(const ExperimentConfig& cfg) {
    RunOutput out;
    out.header = common_header(cfg);
    out.header.emplace_back("input", input_echo(cfg));
    if (cfg.input_was_normalized) out.header.emplace_back("input_normalized", "1");
    out.header.emplace_back("dim", std::to_string(cfg.dim));
    out.header.emplace_back("theta", fmt_g(cfg.theta));
    out.header.emplace_back("phi", fmt_g(cfg.phi));

    ScissorsParams params;
    params.dim = cfg.dim;
    params.splitter = BeamSplitterSpec{cfg.theta, cfg.phi};

    std::vector<cplx> fixed_amps = cfg.input_amps;
    fixed_amps.resize(std::max<std::size_t>(fixed_amps.size(), 2), cplx(0, 0));
    const std::optional<ScissorsSession> shared_session =
        cfg.random_input
            ? std::nullopt
            : std::optional<ScissorsSession>(ScissorsSession(
                  FockVector(static_cast<int>(fixed_amps.size()), fixed_amps),
                  params));

    // The known device phase on |1> (detector-pattern dependent) is undone
    // before scoring, so fidelity measures pure truncation loss.
    const cplx unflip = std::exp(cplx(0, 2.0 * cfg.phi));

    out.records.resize(cfg.trials);
    std::vector<double> fid(cfg.trials, 0.0);
    std::vector<int> success(cfg.trials, 0), pattern(cfg.trials);

    for_each_trial(cfg.trials, cfg.workers, [&](long t) {
        RngStream rng(cfg.seed, 1 + static_cast<std::uint64_t>(t));
        std::vector<cplx> in_amps;
        if (cfg.random_input) {
            const StateVector q = random_qubit(rng);
            in_amps = {q[0], q[1]};
        } else {
            in_amps = fixed_amps;
        }
        const std::optional<ScissorsSession> local =
            cfg.random_input
                ? std::optional<ScissorsSession>(ScissorsSession(
                      FockVector(static_cast<int>(in_amps.size()), in_amps),
                      params))
                : std::nullopt;
        const ScissorsSession& session =
            cfg.random_input ? *local : *shared_session;

        const ScissorsResult r = session.run(rng);
        double f = 0.0;
        if (r.success) {
            const cplx out0 = r.output.as_state()[0];
            cplx out1 = r.output.as_state()[1] * unflip;
            if (r.phase_flipped) out1 = -out1;
            f = std::norm(std::conj(in_amps[0]) * out0 +
                          std::conj(in_amps[1]) * out1);
        }
        fid[t] = f;
        success[t] = r.success ? 1 : 0;
        pattern[t] = r.pattern.d1 * cfg.dim + r.pattern.d2;
        out.records[t].fields = {
            {"trial", std::to_string(t)},
            {"d1", std::to_string(r.pattern.d1)},
            {"d2", std::to_string(r.pattern.d2)},
            {"success", r.success ? "1" : "0"},
            {"herald_p", fmt_g(r.herald_probability)},
            {"phase_flipped", r.phase_flipped ? "1" : "0"},
            {"fidelity", fmt_g(f)},
        };
    });

    std::vector<long> counts(cfg.dim * cfg.dim, 0);
    long ok = 0;
    double fsum = 0.0;
    for (long t = 0; t < cfg.trials; ++t) {
        ++counts[pattern[t]];
        if (success[t]) {
            ++ok;
            fsum += fid[t];
        }
    }
    out.summary = {
        {"protocol", protocol_name(cfg.protocol)},
        {"trials", std::to_string(cfg.trials)},
        {"success_rate", fmt_g(double(ok) / double(cfg.trials))},
        {"mean_fidelity", fmt_g(ok ? fsum / double(ok) : 0.0)},
    };
    for (int d1 = 0; d1 < cfg.dim; ++d1)
        for (int d2 = 0; d2 < cfg.dim; ++d2)
            if (counts[d1 * cfg.dim + d2] > 0)
                out.summary.emplace_back(
                    "pattern_" + std::to_string(d1) + "_" + std::to_string(d2),
                    std::to_string(counts[d1 * cfg.dim + d2]));
    return out;
}

inline RunOutput run_cavity(const ExperimentConfig& cfg) {
    RunOutput out;
    out.header = common_header(cfg);
    out.header.emplace_back("input", input_echo(cfg));
    if (cfg.input_was_normalized) out.header.emplace_back("input_normalized", "1");
    out.header.emplace_back("kappa", fmt_g(cfg.cavity.kappa));
    out.header.emplace_back("g_eff", fmt_g(cfg.cavity.g_eff));
    out.header.emplace_back("T", fmt_g(cfg.cavity.T));
    out.header.emplace_back("dt", fmt_g(cfg.cavity.dt));
    out.header.emplace_back("residual_tol", fmt_g(cfg.residual_tol));

    const std::optional<AtomQubit> fixed_input =
        cfg.random_input
            ? std::nullopt
            : std::optional<AtomQubit>(
                  AtomQubit(cfg.input_amps[0], cfg.input_amps[1]));
    const std::optional<JointCavityState> fixed_joint =
        fixed_input ? std::optional<JointCavityState>(
                          prepare_joint(*fixed_input))
                    : std::nullopt;

    struct Nums {
        int clicks = 0, detector = 0, accepted = 0;
        double fidelity = 0.0, click_time = 0.0, residual = 0.0, drift = 0.0;
        bool rejected = false;
    };
    out.records.resize(cfg.trials);
    std::vector<Nums> nums(cfg.trials);

    for_each_trial(cfg.trials, cfg.workers, [&](long t) {
        RngStream rng(cfg.seed, 1 + static_cast<std::uint64_t>(t));
        std::optional<AtomQubit> local_input;
        std::optional<JointCavityState> local_joint;
        if (cfg.random_input) {
            local_input.emplace(cplx(rng.normal(), rng.normal()),
                                cplx(rng.normal(), rng.normal()));
            local_joint.emplace(prepare_joint(*local_input));
        }
        const AtomQubit& input = cfg.random_input ? *local_input : *fixed_input;
        const JointCavityState& joint =
            cfg.random_input ? *local_joint : *fixed_joint;

        const TrajectoryRecord rec = evolve_heralded(joint, cfg.cavity, rng);
        Nums n;
        n.clicks = static_cast<int>(rec.clicks.size());
        n.drift = rec.max_drift_norm_ratio;
        if (rec.success) {
            try {
                const HeraldOutcome h =
                    herald_and_correct(rec, cfg.residual_tol);
                n.accepted = 1;
                n.detector = h.detector;
                n.click_time = h.click_time;
                n.residual = h.residual;
                n.fidelity = fidelity(input, h.bob);
            } catch (const WindowTooShortError& e) {
                n.rejected = true;
                n.detector = rec.clicks.front().detector;
                n.click_time = rec.clicks.front().time;
                n.residual = e.residual;
            }
        }
        nums[t] = n;
        out.records[t].fields = {
            {"trial", std::to_string(t)},
            {"clicks", std::to_string(n.clicks)},
            {"detector", std::to_string(n.detector)},
            {"click_time", fmt_g(n.click_time)},
            {"success", n.clicks == 1 ? "1" : "0"},
            {"accepted", n.accepted ? "1" : "0"},
            {"residual", fmt_g(n.residual)},
            {"fidelity", fmt_g(n.fidelity)},
        };
    });

    long zero = 0, multi = 0, heralds = 0, accepted = 0, rejects = 0;
    long d1 = 0, d2 = 0;
    double fsum = 0.0, tsum = 0.0, drift = 0.0;
    for (long t = 0; t < cfg.trials; ++t) {
        const Nums& n = nums[t];
        drift = std::max(drift, n.drift);
        if (n.clicks == 0) ++zero;
        else if (n.clicks > 1) ++multi;
        else {
            ++heralds;
            if (n.accepted) {
                ++accepted;
                fsum += n.fidelity;
                tsum += n.click_time;
                (n.detector == 1 ? d1 : d2)++;
            } else {
                ++rejects;
            }
        }
    }
    out.summary = {
        {"protocol", protocol_name(cfg.protocol)},
        {"trials", std::to_string(cfg.trials)},
        {"success_rate", fmt_g(double(heralds) / double(cfg.trials))},
        {"accepted", std::to_string(accepted)},
        {"window_rejects", std::to_string(rejects)},
        {"zero_click", std::to_string(zero)},
        {"multi_click", std::to_string(multi)},
        {"d1", std::to_string(d1)},
        {"d2", std::to_string(d2)},
        {"mean_conditional_fidelity",
         fmt_g(accepted ? fsum / double(accepted) : 0.0)},
        {"mean_click_time", fmt_g(accepted ? tsum / double(accepted) : 0.0)},
        {"max_drift_norm_ratio", fmt_g(drift)},
    };
    return out;
}

}  // namespace detail

// Runs the configured experiment and returns the full deterministic output:
// config echo, one record per trial in trial order, and the summary. The
// same (config, seed) yields the same output at every worker count because
// each trial owns a counter-based substream and a dedicated output slot.
inline RunOutput run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.protocol) {
        case Protocol::Teleport: return detail::run_teleport(cfg);
        case Protocol::Swap: return detail::run_swap(cfg);
        case Protocol::Scissors: return detail::run_scissors(cfg);
        case Protocol::Cavity: return detail::run_cavity(cfg);
    }
    throw std::logic_error("run_experiment: bad protocol enum");
}

}  // namespace qtsim::cli
