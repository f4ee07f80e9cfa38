#pragma once

// Subcommand implementations behind the eztree command-line tool. Each command
// renders a fixed-schema table, either as CSV or as aligned text.
//
// CSV schemas (column order is stable):
//   equilibrium  h,c,a,ln_rf,e_ln_r,ln_e_r,premium
//   statics      model,d_ln_er_d_gamma,d_ln_rf_d_gamma,d_premium_d_gamma,price_response
//   dynamics     period,series,value
//   simulate     statistic,estimate,std_error,reference,z_score
//   verify       point,check,value,reference,std_error,z_score,pass
//   sweep        parameter,parameter_value,series,value

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "eztree/dynamics.hpp"
#include "eztree/errors.hpp"
#include "eztree/pricing.hpp"
#include "eztree/scenario.hpp"
#include "eztree/simulation.hpp"
#include "eztree/statics.hpp"

namespace eztree::cli {

enum class Command { Equilibrium, Statics, Dynamics, Simulate, Verify, Sweep };
enum class OutputFormat { Table, Csv };

namespace exit_code {
inline constexpr int kSuccess = 0;
inline constexpr int kInternal = 1;
inline constexpr int kValidation = 2;
inline constexpr int kNoEquilibrium = 3;
inline constexpr int kVerificationFailed = 4;
}  // namespace exit_code

inline std::optional<Command> parse_command(std::string_view name) {
    if (name == "equilibrium") return Command::Equilibrium;
    if (name == "statics") return Command::Statics;
    if (name == "dynamics") return Command::Dynamics;
    if (name == "simulate") return Command::Simulate;
    if (name == "verify") return Command::Verify;
    if (name == "sweep") return Command::Sweep;
    return std::nullopt;
}

/// Command-line overrides of the scenario's [simulation] section.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> draws;
};

struct CommandResult {
    int exit_code = exit_code::kSuccess;
    std::string out;
    std::string err;
};

class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

    std::string render(OutputFormat format) const {
        std::ostringstream o;
        if (format == OutputFormat::Csv) {
            write_csv_row(o, header_);
            for (const auto& r : rows_) write_csv_row(o, r);
            return o.str();
        }
        std::vector<std::size_t> width(header_.size());
        for (std::size_t i = 0; i < header_.size(); ++i) width[i] = header_[i].size();
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
        }
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                o << r[i];
                if (i + 1 < r.size()) o << std::string(width[i] - r[i].size() + 2, ' ');
            }
            o << '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
        return o.str();
    }

private:
    static void write_csv_row(std::ostringstream& o, const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << r[i];
        o << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

namespace detail {

using eztree::format_number;

inline SimulationSection simulation_settings(const Scenario& sc, const Overrides& ov) {
    SimulationSection s = sc.simulation_or_default();
    if (ov.seed) s.config.seed = *ov.seed;
    if (ov.draws) s.config.n_draws = *ov.draws;
    s.config.validate();
    return s;
}

inline Table equilibrium_table(const Preferences& p, const GrowthProcess& g) {
    const Equilibrium e = solve_equilibrium(p, g);
    Table t({"h", "c", "a", "ln_rf", "e_ln_r", "ln_e_r", "premium"});
    t.add({format_number(e.h), format_number(e.c), format_number(e.a), format_number(e.ln_rf),
           format_number(e.e_ln_r), format_number(e.ln_e_r), format_number(e.premium)});
    return t;
}

inline std::vector<std::string> report_row(const DerivativeReport& r) {
    return {to_string(r.model), format_number(r.d_ln_er_d_gamma), format_number(r.d_ln_rf_d_gamma),
            format_number(r.d_premium_d_gamma), to_string(r.price_response_sign)};
}

inline double response_value(PriceResponse r) {
    switch (r) {
        case PriceResponse::Falls: return -1.0;
        case PriceResponse::Rises: return 1.0;
        case PriceResponse::Unchanged: return 0.0;
    }
    return 0.0;
}

inline CommandResult run_statics(const Scenario& sc, OutputFormat f) {
    CommandResult res;
    const auto ez = decompose_dlnER(sc.preferences, sc.growth);
    Table t({"model", "d_ln_er_d_gamma", "d_ln_rf_d_gamma", "d_premium_d_gamma", "price_response"});
    t.add(report_row(ez));
    if (sc.preferences.is_expected_utility()) {
        t.add(report_row(decompose_dlnER(sc.preferences, sc.growth, PricingModel::CCAPM)));
    }
    if (ez.price_response_sign == PriceResponse::Rises) {
        res.err += "warning: rho > 1 (EIS < 1): higher risk aversion raises the equilibrium asset price\n";
    }
    res.out = t.render(f);
    return res;
}

inline std::optional<GammaPath> gamma_path(const Scenario& sc, const Preferences& p) {
    if (!sc.shock) return std::nullopt;
    return sc.shock->resolve(p);
}

inline CommandResult run_dynamics(const Scenario& sc, OutputFormat f, const Overrides& ov) {
    if (!sc.shock) throw ValidationError("dynamics requires a [shock] section");
    const auto sim = simulation_settings(sc, ov);
    const GammaPath path = sc.shock->resolve(sc.preferences);
    const auto sol = solve_c_path(path, sc.preferences, sc.growth, sim.config.horizon);

    const auto y = simulate_growth_path(sc.growth, sim.config);
    std::vector<double> q(sol.horizon + 1, 1.0);
    for (std::size_t t = 1; t < q.size(); ++t) q[t] = q[t - 1] * y[t - 1];
    const auto p = price_path(sol, q);
    const auto r = returns_path(sol, y);

    Table t({"period", "series", "value"});
    for (std::size_t k = 0; k <= sol.horizon; ++k) {
        const std::string period = std::to_string(k);
        t.add({period, "gamma", format_number(sol.gamma_series[k])});
        t.add({period, "h", format_number(sol.h_series[k])});
        t.add({period, "c", format_number(sol.c_series[k])});
        t.add({period, "ln_rf", format_number(risk_free_rate_at(sol, sc.preferences, sc.growth, k))});
        t.add({period, "dividend", format_number(q[k])});
        t.add({period, "price", format_number(p[k])});
        if (k > 0) t.add({period, "gross_return", format_number(r[k - 1])});
    }
    CommandResult res;
    if (f == OutputFormat::Table && path.kind() != PathKind::Constant && path.kind() != PathKind::Custom) {
        const auto kind = path.kind() == PathKind::PermanentStep ? ShockKind::Permanent : ShockKind::Transitory;
        res.out += std::string("price response to ") + to_string(path.kind()) + " shock: "
                   + to_string(classify_price_response(path.shock_delta(), sc.preferences, sc.growth, kind)) + "\n";
    }
    res.out += t.render(f);
    return res;
}

inline CommandResult run_simulate(const Scenario& sc, OutputFormat f, const Overrides& ov) {
    const auto sim = simulation_settings(sc, ov);
    const auto draws = simulate_growth(sc.growth, sim.config);
    const auto e = solve_equilibrium(sc.preferences, sc.growth);
    const auto m = estimate_return_moments(sc.preferences, sc.growth, draws, sim.config.threads);

    auto z = [](double est, double ref, double se) {
        return se > 0.0 ? (est - ref) / se : (est == ref ? 0.0 : std::copysign(INFINITY, est - ref));
    };
    Table t({"statistic", "estimate", "std_error", "reference", "z_score"});
    auto row = [&](const char* name, double est, double se, double ref) {
        t.add({name, format_number(est), format_number(se), format_number(ref), format_number(z(est, ref, se))});
    };
    row("e_ln_r", m.e_ln_r, m.e_ln_r_se, e.e_ln_r);
    row("ln_e_r", m.ln_e_r, m.ln_e_r_se, e.ln_e_r);
    row("premium", m.premium, m.premium_se, e.premium);
    row("var_ln_r", m.var_ln_r, m.var_ln_r_se, sc.growth.sigma2());
    for (auto which : {EulerCondition::Equity, EulerCondition::Bill}) {
        const auto rep = euler_residual_static(sc.preferences, sc.growth, e.c, which, draws, sim.config.threads);
        t.add({std::string("euler_") + to_string(rep.equation), format_number(rep.residual_mean),
               format_number(rep.std_error), "1", format_number(rep.z_score)});
    }
    return {exit_code::kSuccess, t.render(f), {}};
}

struct VerifyState {
    Table table{{"point", "check", "value", "reference", "std_error", "z_score", "pass"}};
    std::size_t failures = 0;

    void add(const std::string& point, const std::string& check, double value, double reference, bool pass,
             double se = NAN, double z = NAN) {
        table.add({point, check, format_number(value), format_number(reference), format_number(se),
                   format_number(z), pass ? "true" : "false"});
        if (!pass) ++failures;
    }
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Closed-form identities and Monte Carlo Euler residuals at one parameter point.
inline void verify_point(VerifyState& st, const std::string& label, const Preferences& p, const GrowthProcess& g,
                         const StandardNormals& normals, const SimulationSection& sim, bool power_check,
                         const std::optional<ShockSpec>& shock) {
    const Equilibrium e = solve_equilibrium(p, g);
    st.add(label, "fixed_point", e.c / (1.0 + e.c), e.h, rel_err(e.c / (1.0 + e.c), e.h) <= 1e-12);
    st.add(label, "premium_identity", e.ln_e_r - e.ln_rf, p.gamma() * g.sigma2(),
           std::abs((e.ln_e_r - e.ln_rf) - p.gamma() * g.sigma2()) <= 1e-12);
    const double pc = price(p, g, 1.0);
    const double pe = price_from_expected_return(p, g, 1.0);
    st.add(label, "price_form", pc, pe, rel_err(pc, pe) <= 1e-10);

    const double step = sim.fd_step;
    if (p.gamma() - step > 0.0) {
        const double fd = finite_difference_derivative(p, g, FdTarget::LnER, FdMode::GammaOnly, step);
        const double an = dlnER_dgamma_ez(p, g);
        st.add(label, "fd_gamma", fd, an, std::abs(fd - an) <= 1e-8);
        // Expected-utility counterpart: rho moved onto gamma.
        if (std::abs(p.gamma() - 1.0) > step) {
            const Preferences eu = p.with_rho(p.gamma());
            const double fdd = finite_difference_derivative(eu, g, FdTarget::LnER, FdMode::GammaRhoDiagonal, step);
            const double and_ = dlnER_dgamma_ccapm(eu, g);
            st.add(label, "fd_ccapm", fdd, and_, std::abs(fdd - and_) <= 1e-8);
        }
    }

    const auto draws = GrowthDraws::from_normals(g, normals);
    const unsigned threads = sim.config.threads;
    for (auto which : {EulerCondition::Equity, EulerCondition::Bill}) {
        const auto r = euler_residual_static(p, g, e.c, which, draws, threads);
        st.add(label, std::string("euler_") + to_string(r.equation), r.residual_mean, 1.0,
               std::abs(r.z_score) < sim.z_threshold, r.std_error, r.z_score);
    }
    if (power_check && g.sigma2() > 0.0 && p.gamma() != 1.0) {
        const auto r = euler_residual_static(p, g, 1.05 * e.c, EulerCondition::Equity, draws, threads);
        st.add(label, "power_10a_c_x1.05", r.residual_mean, 1.0, std::abs(r.z_score) > 3.0, r.std_error, r.z_score);
    }

    if (!shock) return;
    const GammaPath path = shock->resolve(p);
    const auto sol = solve_c_path(path, p, g, sim.config.horizon);
    for (std::size_t t = 0; t <= sol.horizon; ++t) {
        const double oracle = forward_series_oracle(path, p, g, t, 1e-12);
        st.add(label, "forward_series_t" + std::to_string(t), sol.c_series[t], oracle,
               rel_err(sol.c_series[t], oracle) <= 1e-10);
    }
    if (path.kind() == PathKind::PermanentStep || path.kind() == PathKind::TransitoryPulse) {
        const std::size_t s = path.shock_time();
        const auto kind = path.kind() == PathKind::PermanentStep ? ShockKind::Permanent : ShockKind::Transitory;
        const auto predicted = classify_price_response(path.shock_delta(), p, g, kind);
        const double before = sol.c_series[s - 1];
        const double after = sol.c_series[s];
        const auto observed = after < before ? PriceResponse::Falls
                              : after > before ? PriceResponse::Rises
                                               : PriceResponse::Unchanged;
        st.add(label, std::string("sign_") + to_string(predicted), after / before, 1.0, predicted == observed);
    }
    for (std::size_t t = 0; t < sol.horizon; ++t) {
        for (auto which : {EulerCondition::Equity, EulerCondition::Bill}) {
            const auto r = euler_residual_dynamic(p, path, g, sol, t, which, draws, threads);
            st.add(label, std::string("euler_") + to_string(r.equation) + "_t" + std::to_string(t), r.residual_mean,
                   1.0, std::abs(r.z_score) < sim.z_threshold, r.std_error, r.z_score);
        }
    }
}

inline CommandResult run_verify(const Scenario& sc, OutputFormat f, const Overrides& ov) {
    const auto sim = simulation_settings(sc, ov);
    const auto normals = draw_standard_normals(sim.config);
    VerifyState st;
    verify_point(st, "base", sc.preferences, sc.growth, normals, sim, true, sc.shock);
    if (sc.sweep) {
        for (double v : sc.sweep->points()) {
            const auto [p, g] = sc.at(sc.sweep->parameter, v);
            verify_point(st, std::string(to_string(sc.sweep->parameter)) + "=" + format_number(v), p, g, normals, sim,
                         false, std::nullopt);
        }
    }
    CommandResult res;
    res.out = st.table.render(f);
    if (st.failures > 0) {
        res.exit_code = exit_code::kVerificationFailed;
        res.err = "verification failed: " + std::to_string(st.failures) + " check(s) did not pass\n";
    }
    return res;
}

inline CommandResult run_sweep(const Scenario& sc, OutputFormat f, const Overrides& ov) {
    if (!sc.sweep) throw ValidationError("sweep requires a [sweep] section");
    const auto& axis = *sc.sweep;
    if (axis.analysis == SweepAnalysis::Dynamics && !sc.shock) {
        throw ValidationError("dynamics sweep requires a [shock] section");
    }
    const std::string name = to_string(axis.parameter);
    Table t({"parameter", "parameter_value", "series", "value"});
    CommandResult res;
    for (double v : axis.points()) {
        const std::string pv = format_number(v);
        auto emit = [&](const char* series, double value) { t.add({name, pv, series, format_number(value)}); };
        try {
            const auto [p, g] = sc.at(axis.parameter, v);
            switch (axis.analysis) {
                case SweepAnalysis::Equilibrium: {
                    const auto e = solve_equilibrium(p, g);
                    emit("h", e.h);
                    emit("c", e.c);
                    emit("a", e.a);
                    emit("ln_rf", e.ln_rf);
                    emit("e_ln_r", e.e_ln_r);
                    emit("ln_e_r", e.ln_e_r);
                    emit("premium", e.premium);
                    break;
                }
                case SweepAnalysis::Statics: {
                    const auto r = decompose_dlnER(p, g);
                    emit("d_ln_er_d_gamma", r.d_ln_er_d_gamma);
                    emit("d_ln_rf_d_gamma", r.d_ln_rf_d_gamma);
                    emit("d_premium_d_gamma", r.d_premium_d_gamma);
                    emit("price_response", response_value(r.price_response_sign));
                    break;
                }
                case SweepAnalysis::Dynamics: {
                    const GammaPath path = sc.shock->resolve(p);
                    const auto sim = simulation_settings(sc, ov);
                    const auto sol = solve_c_path(path, p, g, sim.config.horizon);
                    const std::size_t s = std::max<std::size_t>(path.shock_time(), 1);
                    emit("c_pre", sol.c_series[s - 1]);
                    emit("c_post", sol.c_series[s]);
                    const auto kind =
                        path.kind() == PathKind::TransitoryPulse ? ShockKind::Transitory : ShockKind::Permanent;
                    emit("price_response",
                         response_value(classify_price_response(path.shock_delta(), p, g, kind)));
                    break;
                }
            }
        } catch (const NoEquilibrium&) {
            emit("no_equilibrium", NAN);
        } catch (const ValidationError&) {
            emit("invalid", NAN);
        }
    }
    res.out = t.render(f);
    return res;
}

}  // namespace detail

/// Runs one subcommand; never throws. Errors map to the exit-code contract.
inline CommandResult run_command(Command command, const Scenario& scenario, OutputFormat format,
                                 const Overrides& overrides = {}) {
    try {
        switch (command) {
            case Command::Equilibrium:
                return {exit_code::kSuccess,
                        detail::equilibrium_table(scenario.preferences, scenario.growth).render(format),
                        {}};
            case Command::Statics: return detail::run_statics(scenario, format);
            case Command::Dynamics: return detail::run_dynamics(scenario, format, overrides);
            case Command::Simulate: return detail::run_simulate(scenario, format, overrides);
            case Command::Verify: return detail::run_verify(scenario, format, overrides);
            case Command::Sweep: return detail::run_sweep(scenario, format, overrides);
        }
    } catch (const ValidationError& e) {
        return {exit_code::kValidation, {}, std::string("error: ") + e.what() + "\n"};
    } catch (const NoEquilibrium& e) {
        return {exit_code::kNoEquilibrium, {}, std::string("error: ") + e.what() + "\n"};
    } catch (const std::exception& e) {
        return {exit_code::kInternal, {}, std::string("internal error: ") + e.what() + "\n"};
    }
    return {exit_code::kInternal, {}, "internal error: unknown command\n"};
}

}  // namespace eztree::cli
