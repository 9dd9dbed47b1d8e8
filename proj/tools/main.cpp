// qtsim: seeded batch experiments on small quantum protocols.
//
// Exit codes: 0 success, 1 selftest failure, 2 configuration error,
// 3 runtime error during trials.

#include <unistd.h>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qtsim/config.hpp"
#include "qtsim/report.hpp"
#include "qtsim/runner.hpp"
#include "qtsim/selftest.hpp"

namespace {

struct SubcommandArgs {
    qtsim::cli::Protocol protocol;
    std::string config_path;
    // Raw key=value assignments collected from the flags that were given.
    std::vector<std::pair<std::string, std::string>> assignments;
};

// Wires one protocol subcommand: every flag maps onto the config key of the
// same name; only flags that were actually passed become overrides.
void add_protocol_subcommand(CLI::App& app, qtsim::cli::Protocol protocol,
                             const std::string& description,
                             const std::vector<std::string>& extra_keys,
                             std::optional<SubcommandArgs>& chosen) {
    CLI::App* sub =
        app.add_subcommand(qtsim::cli::protocol_name(protocol), description);
    auto args = std::make_shared<SubcommandArgs>();
    args->protocol = protocol;
    sub->add_option("--config", args->config_path,
                    "flat key=value config file (UTF-8, # comments)");

    std::vector<std::string> keys = {"trials", "seed", "workers", "format"};
    keys.insert(keys.end(), extra_keys.begin(), extra_keys.end());
    auto values = std::make_shared<std::vector<std::string>>(keys.size());
    for (size_t i = 0; i < keys.size(); ++i)
        sub->add_option("--" + keys[i], (*values)[i],
                        "override config key '" + keys[i] + "'");

    sub->callback([&chosen, args, keys, values, sub] {
        for (size_t i = 0; i < keys.size(); ++i)
            if (sub->count("--" + keys[i]) > 0)
                args->assignments.emplace_back(keys[i], (*values)[i]);
        chosen = *args;
    });
}

int run_protocol_command(const SubcommandArgs& args) {
    std::vector<std::pair<std::string, std::string>> file_kv;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path, std::ios::binary);
        if (!in) {
            std::cerr << "config error: cannot read '" << args.config_path
                      << "'\n";
            return 2;
        }
        std::ostringstream text;
        text << in.rdbuf();
        file_kv = qtsim::cli::parse_key_values(text.str());
    }

    const qtsim::cli::ExperimentConfig cfg =
        qtsim::cli::build_config(args.protocol, file_kv, args.assignments);
    if (cfg.input_was_normalized)
        std::cerr << "notice: input amplitudes were rescaled to unit norm\n";

    const auto start = std::chrono::steady_clock::now();
    qtsim::cli::RunOutput out;
    try {
        out = qtsim::cli::run_experiment(cfg);
    } catch (const qtsim::cli::TrialError& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start)
            .count();

    qtsim::cli::emit(out, cfg.format, std::cout);
    // Timing is real observed wall clock, so it goes to stderr; stdout stays
    // byte-identical for a fixed (config, seed) at any worker count.
    std::cerr << "timing: wall_ms=" << qtsim::cli::fmt_g(wall_ms) << '\n';
    return 0;
}

std::string self_path() {
    char buf[4096];
    const ssize_t n = readlink("/proc/self/exe", buf, sizeof buf - 1);
    if (n <= 0) return "";
    buf[n] = '\0';
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "qtsim: seeded batch experiments on small quantum protocols\n"
        "Exit codes: 0 success, 1 selftest failure, 2 config error, "
        "3 runtime error."};
    app.require_subcommand(1);

    std::optional<SubcommandArgs> chosen;
    add_protocol_subcommand(
        app, qtsim::cli::Protocol::Teleport,
        "teleport single-qubit states over a shared Bell pair",
        {"input", "shared"}, chosen);
    add_protocol_subcommand(
        app, qtsim::cli::Protocol::Swap,
        "entangle two never-interacting qubits by a joint measurement",
        {"pair14", "pair23"}, chosen);
    add_protocol_subcommand(
        app, qtsim::cli::Protocol::Scissors,
        "heralded teleportation-truncation of an optical mode",
        {"input", "dim", "theta", "phi"}, chosen);
    add_protocol_subcommand(
        app, qtsim::cli::Protocol::Cavity,
        "atomic-state transfer heralded by a cavity-decay photon click",
        {"input", "kappa", "g_eff", "T", "dt", "residual_tol"}, chosen);

    bool selftest = false;
    CLI::App* self = app.add_subcommand(
        "selftest", "run the built-in acceptance checks");
    self->callback([&selftest] { selftest = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the diagnostic
        return 2;
    }

    if (selftest) {
        const int failures = qtsim::selftest::run_all(self_path(), std::cout);
        return failures == 0 ? 0 : 1;
    }

    try {
        return run_protocol_command(*chosen);
    } catch (const qtsim::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
}
