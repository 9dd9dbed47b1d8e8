#pragma once

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qtsim/bell.hpp"
#include "qtsim/cavity.hpp"
#include "qtsim/state.hpp"

namespace qtsim::cli {

// Anything wrong with user-supplied configuration. The message names the
// offending key and the violated constraint; the frontend maps this to its
// config-error exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Protocol { Teleport, Swap, Scissors, Cavity };

inline std::string protocol_name(Protocol p) {
    switch (p) {
        case Protocol::Teleport: return "teleport";
        case Protocol::Swap: return "swap";
        case Protocol::Scissors: return "scissors";
        case Protocol::Cavity: return "cavity";
    }
    throw std::logic_error("protocol_name: bad enum");
}

inline Protocol parse_protocol(const std::string& s) {
    if (s == "teleport") return Protocol::Teleport;
    if (s == "swap") return Protocol::Swap;
    if (s == "scissors") return Protocol::Scissors;
    if (s == "cavity") return Protocol::Cavity;
    throw ConfigError("unknown protocol '" + s +
                      "' (expected teleport, swap, scissors, or cavity)");
}

struct ExperimentConfig {
    Protocol protocol = Protocol::Teleport;
    long trials = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::string format = "lines";  // lines | table

    bool random_input = true;
    std::vector<cplx> input_amps;       // normalized; empty when random
    bool input_was_normalized = false;  // user amplitudes were rescaled

    BellOutcome shared = BellOutcome::A;  // teleport resource pair

    // swap: fixed Bell labels or fresh random labels each trial
    std::optional<BellOutcome> pair14, pair23;

    // scissors
    int dim = 8;
    double theta = 0.78539816339744830962;  // pi/4, balanced splitters
    double phi = 0.0;

    // cavity
    CavityParams cavity;
    double residual_tol = 0.1;
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline bool valid_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace detail

// Flat key=value text: one pair per line, '#' starts a comment, blank lines
// ignored. Keys are word-shaped; duplicates within one source are rejected.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(
    const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    size_t pos = 0;
    int lineno = 0;
    while (pos <= text.size()) {
        const size_t eol = text.find('\n', pos);
        std::string line = text.substr(
            pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++lineno;

        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected key=value, got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": empty key");
        for (char c : key)
            if (!detail::valid_key_char(c))
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": key '" + key +
                                  "' has non-word characters");
        if (value.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": empty value for key '" + key + "'");
        for (const auto& kv : out)
            if (kv.first == key)
                throw ConfigError("duplicate key '" + key + "'");
        out.emplace_back(key, value);
    }
    return out;
}

namespace detail {

inline long parse_long(const std::string& key, const std::string& v) {
    try {
        size_t idx = 0;
        const long n = std::stol(v, &idx);
        if (idx != v.size()) throw std::invalid_argument("trailing");
        return n;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + v +
                          "' is not an integer");
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    if (!v.empty() && v[0] == '-')
        throw ConfigError("key '" + key + "': must be non-negative");
    try {
        size_t idx = 0;
        const std::uint64_t n = std::stoull(v, &idx);
        if (idx != v.size()) throw std::invalid_argument("trailing");
        return n;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + v +
                          "' is not an unsigned integer");
    }
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t idx = 0;
        const double x = std::stod(v, &idx);
        if (idx != v.size()) throw std::invalid_argument("trailing");
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': '" + v +
                          "' is not a finite number");
    }
}

// One complex amplitude: "0.6", "-0.8i", "i", "0.6+0.8i", "1e-2-3e-4i".
inline cplx parse_complex_one(const std::string& key, const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ConfigError("key '" + key + "': empty amplitude");

    const auto bad = [&]() -> ConfigError {
        return ConfigError("key '" + key + "': cannot parse amplitude '" +
                           raw + "'");
    };
    const auto number = [&](const std::string& t) -> double {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        try {
            size_t idx = 0;
            const double x = std::stod(t, &idx);
            if (idx != t.size() || !std::isfinite(x)) throw bad();
            return x;
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw bad();
        }
    };

    if (s.back() != 'i') return cplx(number(s), 0.0);
    const std::string body = s.substr(0, s.size() - 1);
    // Split at the last +/- that is not a leading sign or an exponent sign.
    size_t split = std::string::npos;
    for (size_t j = body.size(); j-- > 1;) {
        if ((body[j] == '+' || body[j] == '-') && body[j - 1] != 'e' &&
            body[j - 1] != 'E') {
            split = j;
            break;
        }
    }
    if (split == std::string::npos) return cplx(0.0, number(body));
    return cplx(number(body.substr(0, split)), number(body.substr(split)));
}

inline std::vector<cplx> parse_amplitudes(const std::string& key,
                                          const std::string& v) {
    std::vector<cplx> out;
    size_t pos = 0;
    while (pos <= v.size()) {
        const size_t comma = v.find(',', pos);
        const std::string piece = v.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        out.push_back(parse_complex_one(key, piece));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

inline BellOutcome parse_bell_label(const std::string& key,
                                    const std::string& v) {
    if (v.size() == 1 && v[0] >= 'A' && v[0] <= 'D')
        return bell_from_index(v[0] - 'A');
    throw ConfigError("key '" + key + "': expected A, B, C, or D, got '" + v +
                      "'");
}

inline const std::vector<std::string>& keys_for(Protocol p) {
    static const std::vector<std::string> teleport = {
        "protocol", "trials", "seed", "workers", "format", "input", "shared"};
    static const std::vector<std::string> swap_keys = {
        "protocol", "trials", "seed", "workers", "format", "pair14",
        "pair23"};
    static const std::vector<std::string> scissors = {
        "protocol", "trials", "seed", "workers", "format", "input", "dim",
        "theta", "phi"};
    static const std::vector<std::string> cavity = {
        "protocol", "trials", "seed", "workers", "format", "input", "kappa",
        "g_eff", "T", "dt", "residual_tol"};
    switch (p) {
        case Protocol::Teleport: return teleport;
        case Protocol::Swap: return swap_keys;
        case Protocol::Scissors: return scissors;
        case Protocol::Cavity: return cavity;
    }
    throw std::logic_error("keys_for: bad enum");
}

static const std::vector<std::string> kAllKeys = {
    "protocol", "trials", "seed",  "workers", "format",
    "input",    "shared", "pair14", "pair23", "dim",
    "theta",    "phi",    "kappa", "g_eff",  "T",
    "dt",       "residual_tol"};

inline std::string env_name(const std::string& key) {
    std::string out = "QTSIM_";
    for (char c : key)
        out.push_back(
            static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    return out;
}

}  // namespace detail

// Merge sources and build a validated config. Precedence, highest first:
// command line, QTSIM_* environment variables, config file, defaults. The
// protocol comes from the subcommand when given; a protocol key in the file
// must then agree with it.
inline ExperimentConfig build_config(
    std::optional<Protocol> forced_protocol,
    const std::vector<std::pair<std::string, std::string>>& file_kv,
    const std::vector<std::pair<std::string, std::string>>& cli_kv) {
    // Reject keys that exist for no protocol at all before resolving one, so
    // typos are named even when the protocol line is missing.
    for (const auto& kv : file_kv) {
        bool known = false;
        for (const auto& k : detail::kAllKeys) known = known || k == kv.first;
        if (!known) throw ConfigError("unknown key '" + kv.first + "'");
    }

    std::map<std::string, std::string> merged;
    for (const auto& kv : file_kv) merged[kv.first] = kv.second;

    Protocol protocol;
    if (forced_protocol) {
        protocol = *forced_protocol;
        const auto it = merged.find("protocol");
        if (it != merged.end() && parse_protocol(it->second) != protocol)
            throw ConfigError("config file says protocol '" + it->second +
                              "' but the subcommand is '" +
                              protocol_name(protocol) + "'");
    } else {
        const auto it = merged.find("protocol");
        if (it == merged.end())
            throw ConfigError("missing key 'protocol'");
        protocol = parse_protocol(it->second);
    }

    const auto& keys = detail::keys_for(protocol);
    const auto known_here = [&](const std::string& k) {
        for (const auto& key : keys)
            if (key == k) return true;
        return false;
    };
    for (const auto& kv : merged)
        if (!known_here(kv.first))
            throw ConfigError("key '" + kv.first +
                              "' does not apply to protocol '" +
                              protocol_name(protocol) + "'");

    // Environment, then command line, both restricted to this protocol's
    // keys. Unrelated QTSIM_* variables are ignored by construction.
    for (const auto& key : keys) {
        if (key == "protocol") continue;
        if (const char* v = std::getenv(detail::env_name(key).c_str()))
            merged[key] = v;
    }
    for (const auto& kv : cli_kv) {
        if (!known_here(kv.first))
            throw ConfigError("key '" + kv.first +
                              "' does not apply to protocol '" +
                              protocol_name(protocol) + "'");
        merged[kv.first] = kv.second;
    }

    ExperimentConfig cfg;
    cfg.protocol = protocol;
    const auto get = [&](const std::string& k) -> std::optional<std::string> {
        const auto it = merged.find(k);
        if (it == merged.end()) return std::nullopt;
        return it->second;
    };

    if (const auto v = get("trials")) {
        cfg.trials = detail::parse_long("trials", *v);
        if (cfg.trials <= 0 || cfg.trials > 100000000)
            throw ConfigError(
                "key 'trials': must be a positive integer (at most 1e8)");
    }
    if (const auto v = get("seed")) cfg.seed = detail::parse_u64("seed", *v);
    if (const auto v = get("workers")) {
        const long w = detail::parse_long("workers", *v);
        if (w < 1 || w > 64)
            throw ConfigError("key 'workers': must be between 1 and 64");
        cfg.workers = static_cast<int>(w);
    }
    if (const auto v = get("format")) {
        if (*v != "lines" && *v != "table")
            throw ConfigError("key 'format': expected lines or table, got '" +
                              *v + "'");
        cfg.format = *v;
    }

    if (protocol == Protocol::Scissors) {
        if (const auto v = get("dim")) {
            const long d = detail::parse_long("dim", *v);
            if (d < 3 || d > 16)
                throw ConfigError("key 'dim': must be between 3 and 16");
            cfg.dim = static_cast<int>(d);
        }
        if (const auto v = get("theta")) {
            cfg.theta = detail::parse_double("theta", *v);
            if (!(cfg.theta > 0.0) || !(cfg.theta < 3.14159265358979323846))
                throw ConfigError(
                    "key 'theta': must lie strictly between 0 and pi");
        }
        if (const auto v = get("phi")) cfg.phi = detail::parse_double("phi", *v);
    }

    if (protocol == Protocol::Cavity) {
        if (const auto v = get("kappa"))
            cfg.cavity.kappa = detail::parse_double("kappa", *v);
        if (const auto v = get("g_eff"))
            cfg.cavity.g_eff = detail::parse_double("g_eff", *v);
        if (const auto v = get("T"))
            cfg.cavity.T = detail::parse_double("T", *v);
        if (const auto v = get("dt"))
            cfg.cavity.dt = detail::parse_double("dt", *v);
        try {
            cfg.cavity.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (const auto v = get("residual_tol")) {
            cfg.residual_tol = detail::parse_double("residual_tol", *v);
            if (!(cfg.residual_tol > 0.0) || cfg.residual_tol > 1.0)
                throw ConfigError(
                    "key 'residual_tol': must lie in (0, 1]");
        }
    }

    if (protocol == Protocol::Teleport) {
        if (const auto v = get("shared"))
            cfg.shared = detail::parse_bell_label("shared", *v);
    }

    if (protocol == Protocol::Swap) {
        if (const auto v = get("pair14"); v && *v != "random")
            cfg.pair14 = detail::parse_bell_label("pair14", *v);
        if (const auto v = get("pair23"); v && *v != "random")
            cfg.pair23 = detail::parse_bell_label("pair23", *v);
    }

    if (const auto v = get("input"); v && *v != "random") {
        std::vector<cplx> amps = detail::parse_amplitudes("input", *v);
        const size_t want_two = 2;
        if (protocol == Protocol::Teleport || protocol == Protocol::Cavity) {
            if (amps.size() != want_two)
                throw ConfigError("key 'input': protocol '" +
                                  protocol_name(protocol) +
                                  "' needs exactly 2 amplitudes, got " +
                                  std::to_string(amps.size()));
        } else {  // scissors
            if (amps.empty() ||
                amps.size() > static_cast<size_t>(cfg.dim - 2))
                throw ConfigError(
                    "key 'input': scissors accepts 1 to dim-2 = " +
                    std::to_string(cfg.dim - 2) + " amplitudes, got " +
                    std::to_string(amps.size()));
        }
        double n2 = 0.0;
        for (const cplx& a : amps) n2 += std::norm(a);
        if (n2 < 1e-24)
            throw ConfigError("key 'input': state is not normalizable");
        if (std::abs(n2 - 1.0) > 1e-9) {
            cfg.input_was_normalized = true;
            const double inv = 1.0 / std::sqrt(n2);
            for (cplx& a : amps) a *= inv;
        }
        cfg.random_input = false;
        cfg.input_amps = std::move(amps);
    }

    return cfg;
}

// Standalone text form: the protocol must be named in the text itself.
inline ExperimentConfig parse_config(const std::string& text) {
    return build_config(std::nullopt, parse_key_values(text), {});
}

}  // namespace qtsim::cli
