#pragma once

// Scenario files: `key = value` lines under `[section]` headers. Sections are
// preferences, growth, shock, simulation and sweep. `#` starts a comment.
// Unknown sections or keys are errors.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <utility>
#include <vector>

#include "eztree/dynamics.hpp"
#include "eztree/errors.hpp"
#include "eztree/simulation.hpp"
#include "eztree/types.hpp"

namespace eztree {

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[400];
    const double m = std::abs(v);
    const auto res = m == 0.0 || (m >= 1e-5 && m < 1e15) ? std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed)
                                                         : std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct ShockSpec {
    PathKind kind = PathKind::Constant;
    std::optional<double> base_gamma;  // defaults to the preference gamma
    double shock_delta = 0.0;
    std::size_t shock_time = 1;
    std::vector<double> values;            // custom only
    std::optional<double> terminal_gamma;  // custom only

    GammaPath resolve(const Preferences& prefs) const {
        const double base = base_gamma.value_or(prefs.gamma());
        switch (kind) {
            case PathKind::Constant: return GammaPath::constant(base);
            case PathKind::PermanentStep: return GammaPath::permanent_step(base, shock_delta, shock_time);
            case PathKind::TransitoryPulse: return GammaPath::transitory_pulse(base, shock_delta, shock_time);
            case PathKind::Custom: return GammaPath::custom(values, terminal_gamma.value_or(base));
        }
        return GammaPath::constant(base);
    }

    friend bool operator==(const ShockSpec&, const ShockSpec&) = default;
};

struct SimulationSection {
    SimulationConfig config;
    double fd_step = 1e-4;
    double z_threshold = 4.0;

    friend bool operator==(const SimulationSection&, const SimulationSection&) = default;
};

enum class SweepParameter { Gamma, Rho, Delta, Mu, Sigma2 };
enum class SweepAnalysis { Equilibrium, Statics, Dynamics };

inline const char* to_string(SweepParameter p) noexcept {
    switch (p) {
        case SweepParameter::Gamma: return "gamma";
        case SweepParameter::Rho: return "rho";
        case SweepParameter::Delta: return "delta";
        case SweepParameter::Mu: return "mu";
        case SweepParameter::Sigma2: return "sigma2";
    }
    return "?";
}

inline const char* to_string(SweepAnalysis a) noexcept {
    switch (a) {
        case SweepAnalysis::Equilibrium: return "equilibrium";
        case SweepAnalysis::Statics: return "statics";
        case SweepAnalysis::Dynamics: return "dynamics";
    }
    return "?";
}

struct SweepAxis {
    SweepParameter parameter = SweepParameter::Gamma;
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 1;
    SweepAnalysis analysis = SweepAnalysis::Equilibrium;

    std::vector<double> points() const {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i) {
            v[i] = count == 1 ? start
                              : start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
        }
        return v;
    }

    friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct Scenario {
    Preferences preferences;
    GrowthProcess growth;
    std::optional<ShockSpec> shock;
    std::optional<SimulationSection> simulation;
    std::optional<SweepAxis> sweep;

    /// Copy of the model parameters with one swept parameter replaced.
    std::pair<Preferences, GrowthProcess> at(SweepParameter p, double value) const {
        switch (p) {
            case SweepParameter::Gamma: return {preferences.with_gamma(value), growth};
            case SweepParameter::Rho: return {preferences.with_rho(value), growth};
            case SweepParameter::Delta: return {preferences.with_delta(value), growth};
            case SweepParameter::Mu: return {preferences, growth.with_mu(value)};
            case SweepParameter::Sigma2: return {preferences, growth.with_sigma2(value)};
        }
        return {preferences, growth};
    }

    SimulationSection simulation_or_default() const { return simulation.value_or(SimulationSection{}); }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view text, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
        throw ParseError(line, "expected a number, got '" + std::string(text) + "'");
    }
    return v;
}

template <class Int>
Int parse_integer(std::string_view text, std::size_t line) {
    Int v{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || text.empty()) {
        throw ParseError(line, "expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
}

inline bool parse_bool(std::string_view text, std::size_t line) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ParseError(line, "expected true or false, got '" + std::string(text) + "'");
}

struct Entry {
    std::string value;
    std::size_t line;
};

using Section = std::map<std::string, Entry, std::less<>>;

}  // namespace detail

inline Scenario parse_scenario(std::string_view text) {
    using namespace detail;
    static const std::map<std::string, std::vector<std::string>, std::less<>> known = {
        {"preferences", {"delta", "beta", "rho", "gamma"}},
        {"growth", {"mu", "sigma2"}},
        {"shock", {"kind", "base_gamma", "shock_delta", "shock_time", "values", "terminal_gamma"}},
        {"simulation", {"draws", "horizon", "seed", "streams", "antithetic", "threads", "fd_step", "z_threshold"}},
        {"sweep", {"parameter", "start", "stop", "count", "analysis"}},
    };

    std::map<std::string, Section, std::less<>> sections;
    std::string current;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const auto line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            const auto name = trim(line.substr(1, line.size() - 2));
            if (!known.contains(name)) throw ParseError(line_no, "unknown section [" + std::string(name) + "]");
            if (sections.contains(name)) throw ParseError(line_no, "duplicate section [" + std::string(name) + "]");
            current = std::string(name);
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        if (current.empty()) throw ParseError(line_no, "key outside of any section");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto& keys = known.find(current)->second;
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ParseError(line_no, "unknown key '" + std::string(key) + "' in [" + current + "]");
        }
        if (value.empty()) throw ParseError(line_no, "missing value for '" + std::string(key) + "'");
        auto& sec = sections[current];
        if (sec.contains(key)) throw ParseError(line_no, "duplicate key '" + std::string(key) + "'");
        sec.emplace(std::string(key), Entry{std::string(value), line_no});
    }

    auto section = [&](std::string_view name) -> const Section* {
        const auto it = sections.find(name);
        return it == sections.end() ? nullptr : &it->second;
    };
    auto number = [](const Section& s, std::string_view key) -> std::optional<double> {
        const auto it = s.find(key);
        if (it == s.end()) return std::nullopt;
        return parse_double(it->second.value, it->second.line);
    };
    auto required = [&](const Section* s, std::string_view sec, std::string_view key) {
        const auto v = s ? number(*s, key) : std::nullopt;
        if (!v) throw ValidationError("missing required key '" + std::string(key) + "' in [" + std::string(sec) + "]");
        return *v;
    };

    const Section* prefs = section("preferences");
    const Section* growth = section("growth");
    if (!prefs) throw ValidationError("missing [preferences] section");
    if (!growth) throw ValidationError("missing [growth] section");

    const bool has_delta = prefs->contains("delta");
    const bool has_beta = prefs->contains("beta");
    if (has_delta == has_beta) throw ValidationError("exactly one of delta or beta must be given in [preferences]");
    const double rho = required(prefs, "preferences", "rho");
    const double gamma = required(prefs, "preferences", "gamma");
    Preferences preferences = has_delta ? Preferences(*number(*prefs, "delta"), rho, gamma)
                                        : Preferences::from_beta(*number(*prefs, "beta"), rho, gamma);
    GrowthProcess gp(required(growth, "growth", "mu"), required(growth, "growth", "sigma2"));

    Scenario sc{preferences, gp, std::nullopt, std::nullopt, std::nullopt};

    if (const Section* s = section("shock")) {
        ShockSpec shock;
        const auto kind = s->find("kind");
        if (kind == s->end()) throw ValidationError("missing required key 'kind' in [shock]");
        const auto& k = kind->second.value;
        if (k == "constant") shock.kind = PathKind::Constant;
        else if (k == "permanent") shock.kind = PathKind::PermanentStep;
        else if (k == "transitory") shock.kind = PathKind::TransitoryPulse;
        else if (k == "custom") shock.kind = PathKind::Custom;
        else throw ParseError(kind->second.line, "unknown shock kind '" + k + "'");
        shock.base_gamma = number(*s, "base_gamma");
        shock.shock_delta = number(*s, "shock_delta").value_or(0.0);
        if (const auto it = s->find("shock_time"); it != s->end()) {
            shock.shock_time = parse_integer<std::size_t>(it->second.value, it->second.line);
        }
        if (const auto it = s->find("values"); it != s->end()) {
            std::string_view rest = it->second.value;
            while (true) {
                const auto comma = rest.find(',');
                shock.values.push_back(parse_double(trim(rest.substr(0, comma)), it->second.line));
                if (comma == std::string_view::npos) break;
                rest = rest.substr(comma + 1);
            }
        }
        shock.terminal_gamma = number(*s, "terminal_gamma");
        if (shock.kind == PathKind::Custom && !shock.terminal_gamma) {
            throw ValidationError("custom gamma paths must declare terminal_gamma");
        }
        if (shock.kind != PathKind::Custom && (!shock.values.empty() || shock.terminal_gamma)) {
            throw ValidationError("values and terminal_gamma apply to custom shocks only");
        }
        shock.resolve(preferences);  // validates
        sc.shock = shock;
    }

    if (const Section* s = section("simulation")) {
        SimulationSection sim;
        auto& cfg = sim.config;
        auto integer = [&](std::string_view key, auto& out) {
            if (const auto it = s->find(key); it != s->end()) {
                out = parse_integer<std::remove_reference_t<decltype(out)>>(it->second.value, it->second.line);
            }
        };
        integer("draws", cfg.n_draws);
        integer("horizon", cfg.horizon);
        integer("seed", cfg.seed);
        integer("streams", cfg.stream_count);
        integer("threads", cfg.threads);
        if (const auto it = s->find("antithetic"); it != s->end()) {
            cfg.antithetic = parse_bool(it->second.value, it->second.line);
        }
        sim.fd_step = number(*s, "fd_step").value_or(sim.fd_step);
        sim.z_threshold = number(*s, "z_threshold").value_or(sim.z_threshold);
        cfg.validate();
        if (!(sim.fd_step > 0.0)) throw ValidationError("fd_step must be positive");
        if (!(sim.z_threshold > 0.0)) throw ValidationError("z_threshold must be positive");
        sc.simulation = sim;
    }

    if (const Section* s = section("sweep")) {
        SweepAxis axis;
        const auto param = s->find("parameter");
        if (param == s->end()) throw ValidationError("missing required key 'parameter' in [sweep]");
        const auto& p = param->second.value;
        if (p == "gamma") axis.parameter = SweepParameter::Gamma;
        else if (p == "rho") axis.parameter = SweepParameter::Rho;
        else if (p == "delta") axis.parameter = SweepParameter::Delta;
        else if (p == "mu") axis.parameter = SweepParameter::Mu;
        else if (p == "sigma2") axis.parameter = SweepParameter::Sigma2;
        else throw ValidationError("sweep parameter must be one of gamma, rho, delta, mu, sigma2");
        axis.start = required(s, "sweep", "start");
        axis.stop = required(s, "sweep", "stop");
        const auto count = s->find("count");
        if (count == s->end()) throw ValidationError("missing required key 'count' in [sweep]");
        axis.count = parse_integer<std::size_t>(count->second.value, count->second.line);
        if (axis.count < 1) throw ValidationError("sweep count must be at least 1");
        if (const auto it = s->find("analysis"); it != s->end()) {
            const auto& a = it->second.value;
            if (a == "equilibrium") axis.analysis = SweepAnalysis::Equilibrium;
            else if (a == "statics") axis.analysis = SweepAnalysis::Statics;
            else if (a == "dynamics") axis.analysis = SweepAnalysis::Dynamics;
            else throw ParseError(it->second.line, "sweep analysis must be equilibrium, statics or dynamics");
        }
        sc.sweep = axis;
    }
    return sc;
}

/// Canonical text of a scenario; parse_scenario(format_scenario(s)) == s.
inline std::string format_scenario(const Scenario& s) {
    std::ostringstream o;
    o << "[preferences]\n"
      << "delta = " << format_number(s.preferences.delta()) << "\n"
      << "rho = " << format_number(s.preferences.rho()) << "\n"
      << "gamma = " << format_number(s.preferences.gamma()) << "\n\n"
      << "[growth]\n"
      << "mu = " << format_number(s.growth.mu()) << "\n"
      << "sigma2 = " << format_number(s.growth.sigma2()) << "\n";
    if (s.shock) {
        const auto& k = *s.shock;
        o << "\n[shock]\nkind = " << to_string(k.kind) << "\n";
        if (k.base_gamma) o << "base_gamma = " << format_number(*k.base_gamma) << "\n";
        o << "shock_delta = " << format_number(k.shock_delta) << "\n"
          << "shock_time = " << k.shock_time << "\n";
        if (!k.values.empty()) {
            o << "values = ";
            for (std::size_t i = 0; i < k.values.size(); ++i) o << (i ? ", " : "") << format_number(k.values[i]);
            o << "\n";
        }
        if (k.terminal_gamma) o << "terminal_gamma = " << format_number(*k.terminal_gamma) << "\n";
    }
    if (s.simulation) {
        const auto& c = s.simulation->config;
        o << "\n[simulation]\n"
          << "draws = " << c.n_draws << "\n"
          << "horizon = " << c.horizon << "\n"
          << "seed = " << c.seed << "\n"
          << "streams = " << c.stream_count << "\n"
          << "antithetic = " << (c.antithetic ? "true" : "false") << "\n"
          << "threads = " << c.threads << "\n"
          << "fd_step = " << format_number(s.simulation->fd_step) << "\n"
          << "z_threshold = " << format_number(s.simulation->z_threshold) << "\n";
    }
    if (s.sweep) {
        const auto& w = *s.sweep;
        o << "\n[sweep]\n"
          << "parameter = " << to_string(w.parameter) << "\n"
          << "start = " << format_number(w.start) << "\n"
          << "stop = " << format_number(w.stop) << "\n"
          << "count = " << w.count << "\n"
          << "analysis = " << to_string(w.analysis) << "\n";
    }
    return o.str();
}

}  // namespace eztree
