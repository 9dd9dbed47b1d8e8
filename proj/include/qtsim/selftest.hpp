#pragma once

// Built-in acceptance checks. Each check prints exactly one PASS/FAIL line
// with a measured figure of merit and returns whether it passed; run_all
// drives the full list. The same code backs the `selftest` CLI subcommand
// and the automated acceptance test, so the shipped binary can always
// revalidate itself.

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <sys/wait.h>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qtsim/beamsplitter.hpp"
#include "qtsim/bell.hpp"
#include "qtsim/cavity.hpp"
#include "qtsim/density.hpp"
#include "qtsim/measure.hpp"
#include "qtsim/rng.hpp"
#include "qtsim/scissors.hpp"
#include "qtsim/state.hpp"
#include "qtsim/swap.hpp"
#include "qtsim/teleport.hpp"

namespace qtsim::selftest {

namespace detail {

inline std::string sci(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

inline bool report(std::ostream& os, int index, const std::string& name,
                   bool ok, const std::string& detail) {
    os << (ok ? "PASS" : "FAIL") << ' ' << index << ' ' << name << " ("
       << detail << ")\n";
    return ok;
}

inline StateVector random_qubit(RngStream& rng) {
    return StateVector::single_qubit(cplx(rng.normal(), rng.normal()),
                                     cplx(rng.normal(), rng.normal()));
}

inline FockVector random_fock(int len, RngStream& rng) {
    std::vector<cplx> c(len);
    for (auto& a : c) a = cplx(rng.normal(), rng.normal());
    return FockVector(len, std::move(c));
}

// Chi-square statistic against a uniform four-way split; the 0.001 critical
// value at three degrees of freedom is 16.266.
inline double chi_square_uniform4(const long counts[4], long total) {
    const double expect = double(total) / 4.0;
    double x2 = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double d = double(counts[k]) - expect;
        x2 += d * d / expect;
    }
    return x2;
}

// Independent two-mode splitter construction: assemble the hermitian
// generator theta (e^{i phi} a'b + e^{-i phi} a b') densely and exponentiate
// by eigendecomposition. Same restricted generator, different algorithm.
inline Eigen::MatrixXcd splitter_by_eigensolver(const BeamSplitterSpec& spec,
                                                int dim) {
    const int n2 = dim * dim;
    Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(n2, n2);
    const cplx up = spec.theta * std::exp(cplx(0, spec.phi));
    for (int m = 0; m + 1 < dim; ++m)
        for (int n = 1; n < dim; ++n) {
            // a'b |m,n> = sqrt((m+1) n) |m+1, n-1>
            const double amp = std::sqrt(double(m + 1) * double(n));
            gen((m + 1) * dim + (n - 1), m * dim + n) += up * amp;
            gen(m * dim + n, (m + 1) * dim + (n - 1)) += std::conj(up) * amp;
        }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gen);
    Eigen::VectorXcd phases(n2);
    for (int k = 0; k < n2; ++k)
        phases(k) = std::exp(cplx(0, es.eigenvalues()(k)));
    return es.eigenvectors() * phases.asDiagonal() *
           es.eigenvectors().adjoint();
}

inline std::pair<int, std::string> capture(const std::string& cmd) {
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!pipe) throw std::runtime_error("cannot spawn: " + cmd);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, out};
}

}  // namespace detail

// The four Bell states form an orthonormal basis.
inline bool bell_basis_orthonormal(std::ostream& os) {
    const auto basis = bell_basis();
    double dev = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const cplx g = inner(basis[i], basis[j]);
            dev = std::max(dev, std::abs(g - (i == j ? cplx(1, 0) : cplx(0, 0))));
        }
    return detail::report(os, 1, "bell-basis-orthonormality", dev <= 1e-12,
                          "max Gram deviation " + detail::sci(dev));
}

// Every corrected output equals the input amplitude-for-amplitude, for all
// four forced measurement outcomes.
inline bool teleport_exactness(std::ostream& os) {
    double dev = 0.0;
    for (long k = 0; k < 1000; ++k) {
        RngStream rng(101, 1 + k);
        const StateVector input = detail::random_qubit(rng);
        for (const BellOutcome outcome : kBellOutcomes) {
            const TeleportResult r = teleport_forced(input, outcome);
            dev = std::max(dev, max_abs_diff(r.bob_state, input));
        }
    }
    return detail::report(os, 2, "teleport-exactness", dev <= 1e-10,
                          "1000 inputs x 4 outcomes, max amplitude error " +
                              detail::sci(dev));
}

// The Bell measurement is an unbiased two-bit coin: exact probabilities are
// 1/4 for every input, and sampled frequencies pass chi-square.
inline bool measurement_uniformity(std::ostream& os) {
    double dev = 0.0;
    for (long k = 0; k < 1000; ++k) {
        RngStream rng(102, 1 + k);
        const StateVector joint =
            tensor(detail::random_qubit(rng), bell_state(BellOutcome::A));
        for (const double p : born_probabilities(joint, {0, 1}, bell_basis()))
            dev = std::max(dev, std::abs(p - 0.25));
    }

    long counts[4] = {0, 0, 0, 0};
    const long trials = 100000;
    for (long t = 0; t < trials; ++t) {
        RngStream rng(103, 1 + t);
        const StateVector input = detail::random_qubit(rng);
        ++counts[bell_index(teleport(input, rng).outcome)];
    }
    const double x2 = detail::chi_square_uniform4(counts, trials);

    const bool ok = dev <= 1e-12 && x2 < 16.266;
    return detail::report(os, 3, "measurement-uniformity", ok,
                          "max |p-1/4| " + detail::sci(dev) + ", chi2 " +
                              detail::sci(x2) + " < 16.266");
}

// Before the classical bits arrive, the receiver's reduced state is
// maximally mixed whatever the input: no information travels by collapse.
inline bool no_signaling(std::ostream& os) {
    const Eigen::MatrixXcd half = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
    double dev = 0.0;
    for (long k = 0; k < 100; ++k) {
        RngStream rng(104, 1 + k);
        const StateVector input = detail::random_qubit(rng);
        const StateVector joint = tensor(input, bell_state(BellOutcome::A));
        const DensityMatrix rho = reduced_density(joint, {2});
        dev = std::max(dev, (rho.matrix() - half).cwiseAbs().maxCoeff());

        // Averaging the post-measurement conditionals over the outcome
        // distribution must give the same maximally mixed state.
        Eigen::MatrixXcd mix = Eigen::MatrixXcd::Zero(2, 2);
        for (const BellOutcome outcome : kBellOutcomes) {
            const TeleportResult r = teleport_forced(input, outcome);
            mix += r.probability *
                   DensityMatrix::from_state(r.bob_conditional).matrix();
        }
        dev = std::max(dev, (mix - half).cwiseAbs().maxCoeff());
    }
    return detail::report(os, 4, "no-signaling", dev <= 1e-10,
                          "100 inputs, max deviation from I/2 " +
                              detail::sci(dev));
}

// Balanced-splitter herald law: each single-count pattern fires with
// probability (|c0|^2+|c1|^2)/4 for any input; for qubit inputs the
// combined success rate is exactly one half, and stays within 0.01 of it
// over 1e5 sampled runs.
inline bool scissors_herald_law(std::ostream& os) {
    double dev = 0.0;
    for (int dim = 3; dim <= 6; ++dim) {
        ScissorsParams params;
        params.dim = dim;
        for (long k = 0; k < 25; ++k) {
            RngStream rng(105, 1 + 100 * dim + k);
            params.splitter.phi = (k % 2) ? 0.37 : 0.0;
            const FockVector input = detail::random_fock(
                std::max(2, dim - 2), rng);
            const ScissorsSession session(input, params);
            const double want =
                (std::norm(input[0]) + std::norm(input[1])) / 4.0;
            dev = std::max(dev, std::abs(session.pattern_prob({1, 0}) - want));
            dev = std::max(dev, std::abs(session.pattern_prob({0, 1}) - want));
        }
    }

    double qdev = 0.0;
    ScissorsParams params;
    for (long k = 0; k < 20; ++k) {
        RngStream rng(106, 1 + k);
        const StateVector q = detail::random_qubit(rng);
        const ScissorsSession session(FockVector(2, {q[0], q[1]}), params);
        const double success =
            session.pattern_prob({1, 0}) + session.pattern_prob({0, 1});
        qdev = std::max(qdev, std::abs(success - 0.5));
    }

    const ScissorsSession fixed(
        FockVector(2, {cplx(0.6, 0), cplx(0, 0.8)}), params);
    const long trials = 100000;
    long ok_count = 0;
    for (long t = 0; t < trials; ++t) {
        RngStream rng(107, 1 + t);
        if (fixed.run(rng).success) ++ok_count;
    }
    const double rate = double(ok_count) / double(trials);

    const bool ok =
        dev <= 1e-10 && qdev <= 1e-12 && std::abs(rate - 0.5) <= 0.01;
    return detail::report(
        os, 5, "scissors-herald-law", ok,
        "max pattern-probability error " + detail::sci(dev) +
            ", qubit success error " + detail::sci(qdev) + ", sampled rate " +
            detail::sci(rate));
}

// The heralded output is the input truncated to its vacuum/one-photon part,
// renormalized; the second detector's pattern carries the pinned sign flip.
inline bool scissors_truncation(std::ostream& os) {
    ScissorsParams params;
    params.dim = 6;
    double dev = 0.0;
    for (long k = 0; k < 50; ++k) {
        RngStream rng(108, 1 + k);
        const FockVector input = detail::random_fock(4, rng);
        const ScissorsSession session(input, params);
        const double n =
            std::sqrt(std::norm(input[0]) + std::norm(input[1]));
        if (n < 1e-6) continue;  // truncated mass too small to compare

        const ScissorsResult direct = session.forced({1, 0});
        dev = std::max(dev, std::abs(direct.output[0] - input[0] / n));
        dev = std::max(dev, std::abs(direct.output[1] - input[1] / n));

        const ScissorsResult flipped = session.forced({0, 1});
        dev = std::max(dev, std::abs(flipped.output[0] - input[0] / n));
        dev = std::max(dev, std::abs(flipped.output[1] + input[1] / n));
    }
    return detail::report(os, 6, "scissors-truncation", dev <= 1e-10,
                          "50 inputs, max amplitude error " +
                              detail::sci(dev));
}

// Every input-pair combination and measurement outcome leaves qubits (3,4)
// in a Bell state (up to a sign) with a maximally mixed half.
inline bool swap_entanglement(std::ostream& os) {
    const Eigen::MatrixXcd half = Eigen::MatrixXcd::Identity(2, 2) * 0.5;
    double fdev = 0.0, rdev = 0.0;
    for (const BellOutcome p14 : kBellOutcomes)
        for (const BellOutcome p23 : kBellOutcomes)
            for (const BellOutcome outcome : kBellOutcomes) {
                const SwapResult r =
                    entanglement_swap_forced(p14, p23, outcome);
                const double f =
                    std::norm(inner(bell_state(r.pair34_label), r.pair34));
                fdev = std::max(fdev, std::abs(f - 1.0));
                for (const int keep : {0, 1}) {
                    const DensityMatrix rho =
                        reduced_density(r.pair34, {keep});
                    rdev = std::max(
                        rdev, (rho.matrix() - half).cwiseAbs().maxCoeff());
                }
            }
    const bool ok = fdev <= 1e-10 && rdev <= 1e-10;
    return detail::report(os, 7, "swap-entanglement", ok,
                          "16 pair combinations x 4 outcomes, max fidelity "
                          "error " + detail::sci(fdev) +
                              ", max reduced-state deviation " +
                              detail::sci(rdev));
}

// Long-window heralded transfer: success rate lands on the analytic value
// near one half, and the conditional fidelity agrees with the analytic
// prediction of exact transfer.
inline bool cavity_protocol(std::ostream& os) {
    const AtomQubit input(cplx(0.6, 0.0), cplx(0.0, 0.8));
    const CavityParams params;  // kappa 1, T 10, dt 1e-3
    const long trials = 10000;
    const CavityAggregate agg =
        run_protocol(input, params, trials, 20260817);

    const double q = std::exp(-params.kappa * params.T);
    const double analytic_rate =
        0.5 * (1 - q) + std::norm(input.e) * q * (1 - q);
    const double analytic_fidelity = 1.0;

    const bool ok = std::abs(agg.success_rate - 0.5) <= 0.02 &&
                    agg.mean_conditional_fidelity >= 0.99 &&
                    std::abs(agg.mean_conditional_fidelity -
                             analytic_fidelity) <= 1e-3;
    return detail::report(
        os, 8, "cavity-protocol", ok,
        "rate " + detail::sci(agg.success_rate) + " (analytic " +
            detail::sci(analytic_rate) + "), mean conditional fidelity " +
            detail::sci(agg.mean_conditional_fidelity));
}

// Two independent constructions of the splitter unitary agree entrywise,
// and the no-click drift never inflates the norm on any step.
inline bool oracle_cross_checks(std::ostream& os) {
    double udev = 0.0;
    const BeamSplitterSpec specs[] = {
        {0.78539816339744830962, 0.0}, {0.3, 0.0},
        {0.78539816339744830962, 0.7}, {1.1, -0.4}, {0.6, 2.0}};
    for (int dim = 2; dim <= 6; ++dim)
        for (const auto& spec : specs) {
            const UnitaryOp bs = beamsplitter_unitary(spec, dim);
            const Eigen::MatrixXcd oracle =
                detail::splitter_by_eigensolver(spec, dim);
            udev = std::max(udev,
                            (bs.matrix() - oracle).cwiseAbs().maxCoeff());
        }

    const AtomQubit input(cplx(0.6, 0.0), cplx(0.0, 0.8));
    CavityParams params;
    params.T = 3.0;
    const JointCavityState joint = prepare_joint(input);
    double worst = 0.0;
    for (long k = 0; k < 200; ++k) {
        RngStream rng(109, 1 + k);
        worst = std::max(
            worst, evolve_heralded(joint, params, rng).max_drift_norm_ratio);
    }

    const bool ok = udev <= 1e-10 && worst <= 1.0 + 1e-9;
    return detail::report(os, 9, "oracle-cross-checks", ok,
                          "max splitter discrepancy " + detail::sci(udev) +
                              ", max drift norm ratio " +
                              detail::sci(worst));
}

// The frontend's output is byte-identical across repeated runs and across
// worker counts 1, 4, and 8, for every protocol.
inline bool cli_determinism(const std::string& cli_path, std::ostream& os) {
    if (cli_path.empty())
        return detail::report(os, 10, "cli-determinism", false,
                              "no CLI binary path provided");
    const std::string base = "'" + cli_path + "'";
    const std::string runs[] = {
        " teleport --trials 300 --seed 7",
        " swap --trials 300 --seed 11",
        " scissors --trials 300 --seed 13 --dim 6",
        " cavity --trials 60 --seed 17 --T 3",
    };
    long compared = 0;
    for (const std::string& run : runs) {
        const auto first = detail::capture(base + run + " --workers 1");
        if (first.first != 0)
            return detail::report(os, 10, "cli-determinism", false,
                                  "exit code " +
                                      std::to_string(first.first) + " from" +
                                      run);
        if (first.second.empty())
            return detail::report(os, 10, "cli-determinism", false,
                                  "empty output from" + run);
        for (const char* workers : {"1", "4", "8"}) {
            const auto again = detail::capture(base + run + " --workers " +
                                               workers);
            ++compared;
            if (again.first != 0 || again.second != first.second)
                return detail::report(
                    os, 10, "cli-determinism", false,
                    "output diverged at --workers " + std::string(workers) +
                        " for" + run);
        }
    }
    return detail::report(os, 10, "cli-determinism", true,
                          std::to_string(compared) +
                              " reruns byte-identical across 4 protocols");
}

// Runs every check; returns the number of failures.
inline int run_all(const std::string& cli_path, std::ostream& os) {
    const std::vector<std::pair<std::string, std::function<bool()>>> checks = {
        {"bell-basis-orthonormality",
         [&] { return bell_basis_orthonormal(os); }},
        {"teleport-exactness", [&] { return teleport_exactness(os); }},
        {"measurement-uniformity",
         [&] { return measurement_uniformity(os); }},
        {"no-signaling", [&] { return no_signaling(os); }},
        {"scissors-herald-law", [&] { return scissors_herald_law(os); }},
        {"scissors-truncation", [&] { return scissors_truncation(os); }},
        {"swap-entanglement", [&] { return swap_entanglement(os); }},
        {"cavity-protocol", [&] { return cavity_protocol(os); }},
        {"oracle-cross-checks", [&] { return oracle_cross_checks(os); }},
        {"cli-determinism", [&] { return cli_determinism(cli_path, os); }},
    };
    int failures = 0;
    int index = 0;
    for (const auto& check : checks) {
        ++index;
        bool ok = false;
        try {
            ok = check.second();
        } catch (const std::exception& e) {
            os << "FAIL " << index << ' ' << check.first << " (exception: "
               << e.what() << ")\n";
        }
        if (!ok) ++failures;
    }
    os << (failures == 0 ? "all checks passed"
                         : std::to_string(failures) + " check(s) failed")
       << '\n';
    return failures;
}

}  // namespace qtsim::selftest
