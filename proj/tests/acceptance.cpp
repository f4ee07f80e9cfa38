// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "eztree/eztree.hpp"
#include "support/grid.hpp"

namespace {

using namespace eztree;
using testing::GridPoint;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int g_failures = 0;

template <class Fn>
void criterion(const char* name, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %-34s %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

const std::vector<GridPoint>& grid() {
    static const auto g = testing::parameter_grid(100, 2024);
    return g;
}

constexpr double kFdStep = 1e-4;
constexpr std::size_t kDraws = 1'000'000;

}  // namespace

int main() {
    const Preferences std_prefs{0.02, 0.5, 2.0};
    const GrowthProcess std_growth{0.018, 0.0013};

    criterion("fixed_point_identity", [] {
        double worst = 0.0;
        for (const auto& p : grid()) {
            const double h = h_value(p.prefs, p.growth);
            const double c = price_dividend_ratio(p.prefs, p.growth);
            worst = std::max(worst, std::abs(c / (1.0 + c) - h) / h);
        }
        return Outcome{worst <= 1e-12, fmt("max rel err %.3g over %g points (tol 1e-12)", worst, grid().size())};
    });

    criterion("premium_identity", [] {
        double worst = 0.0;
        for (const auto& p : grid()) {
            const auto e = solve_equilibrium(p.prefs, p.growth);
            worst = std::max(worst, std::abs((e.ln_e_r - e.ln_rf) - p.prefs.gamma() * p.growth.sigma2()));
        }
        return Outcome{worst <= 1e-12, fmt("max abs err %.3g (tol 1e-12)", worst)};
    });

    criterion("price_form_equivalence", [] {
        double worst = 0.0;
        for (const auto& p : grid()) {
            const double a = price(p.prefs, p.growth, 1.0);
            const double b = price_from_expected_return(p.prefs, p.growth, 1.0);
            worst = std::max(worst, std::abs(a - b) / a);
        }
        return Outcome{worst <= 1e-10, fmt("max rel err %.3g (tol 1e-10)", worst)};
    });

    criterion("mc_euler_residuals_static", [] {
        double worst = 0.0;
        std::size_t k = 0;
        for (const auto& p : grid()) {
            SimulationConfig cfg;
            cfg.n_draws = kDraws;
            cfg.seed = 1000 + k++;
            const auto draws = simulate_growth(p.growth, cfg);
            const double c = price_dividend_ratio(p.prefs, p.growth);
            for (auto which : {EulerCondition::Equity, EulerCondition::Bill}) {
                worst = std::max(worst, std::abs(euler_residual_static(p.prefs, p.growth, c, which, draws).z_score));
            }
        }
        return Outcome{worst < 4.0, fmt("max |z| %.3f over %g points x {10a,10b}, n=1e6 (gate 4)", worst, grid().size())};
    });

    criterion("mc_euler_power", [&] {
        SimulationConfig cfg;
        cfg.n_draws = kDraws;
        const auto draws = simulate_growth(std_growth, cfg);
        const double c = price_dividend_ratio(std_prefs, std_growth);
        const auto r = euler_residual_static(std_prefs, std_growth, 1.05 * c, EulerCondition::Equity, draws);
        return Outcome{std::abs(r.z_score) > 3.0, fmt("|z| %.2f at c x 1.05 (must exceed 3)", std::abs(r.z_score))};
    });

    criterion("derivative_agreement", [] {
        double worst_ez = 0.0, worst_eu = 0.0;
        std::size_t n_ez = 0, n_eu = 0;
        for (const auto& p : grid()) {
            if (p.prefs.gamma() > kFdStep) {
                const double fd =
                    finite_difference_derivative(p.prefs, p.growth, FdTarget::LnER, FdMode::GammaOnly, kFdStep);
                worst_ez = std::max(worst_ez, std::abs(fd - dlnER_dgamma_ez(p.prefs, p.growth)));
                ++n_ez;
            }
            // Expected-utility counterpart of the same point (rho := gamma).
            if (p.prefs.gamma() > kFdStep && std::abs(p.prefs.gamma() - 1.0) > kFdStep) {
                const Preferences eu = p.prefs.with_rho(p.prefs.gamma());
                const double fd =
                    finite_difference_derivative(eu, p.growth, FdTarget::LnER, FdMode::GammaRhoDiagonal, kFdStep);
                worst_eu = std::max(worst_eu, std::abs(fd - dlnER_dgamma_ccapm(eu, p.growth)));
                ++n_eu;
            }
        }
        const bool ok = worst_ez <= 1e-8 && worst_eu <= 1e-8 && n_ez >= 50 && n_eu >= 50;
        return Outcome{ok, fmt("gamma-only max err %.3g, diagonal max err %.3g (tol 1e-8)", worst_ez, worst_eu)
                               + " on " + std::to_string(n_ez) + "/" + std::to_string(n_eu) + " points"};
    });

    criterion("decomposition_closure", [] {
        double worst_ulps = 0.0;
        for (const auto& p : grid()) {
            const auto r = decompose_dlnER(p.prefs, p.growth);
            const double sum = r.d_ln_rf_d_gamma + r.d_premium_d_gamma;
            const double ez = dlnER_dgamma_ez(p.prefs, p.growth);
            const double scale = std::max({std::abs(r.d_ln_rf_d_gamma), std::abs(r.d_premium_d_gamma), 1e-300});
            worst_ulps = std::max(worst_ulps, std::abs(sum - ez) / (scale * 2.220446049250313e-16));
            if (sum != r.d_ln_er_d_gamma) return Outcome{false, "report field is not the channel sum"};
        }
        return Outcome{worst_ulps <= 4.0, fmt("channel sum equals 0.5 sigma2 (1-rho) to %.1f ulp", worst_ulps)};
    });

    criterion("sign_theorem", [] {
        std::size_t checked = 0, bad = 0, skipped = 0;
        for (double d : {-1.0, -0.5, 0.5, 1.0}) {
            for (double rho : {0.25, 0.5, 2.0, 4.0}) {
                for (double gamma : {1.5, 3.0, 6.0}) {
                    for (double s2 : {0.0013, 0.005}) {
                        for (double mu : {0.0, 0.018}) {
                            for (double delta : {0.02, 0.05}) {
                                const Preferences p{delta, rho, gamma};
                                const GrowthProcess g{mu, s2};
                                if (h_value(p, g) >= 1.0) {
                                    ++skipped;
                                    continue;
                                }
                                const bool falls = d * (1.0 - rho) > 0.0;
                                for (auto kind : {ShockKind::Permanent, ShockKind::Transitory}) {
                                    const auto path = kind == ShockKind::Permanent
                                                          ? GammaPath::permanent_step(gamma, d, 1)
                                                          : GammaPath::transitory_pulse(gamma, d, 1);
                                    if (terminal_h(path, p, g) >= 1.0) {
                                        ++skipped;
                                        continue;
                                    }
                                    const auto s = solve_c_path(path, p, g, 5);
                                    ++checked;
                                    const bool observed_falls = s.c_series[1] < s.c_series[0];
                                    const auto predicted = classify_price_response(d, p, g, kind);
                                    if (observed_falls != falls || s.c_series[1] == s.c_series[0]
                                        || (predicted == PriceResponse::Falls) != falls) {
                                        ++bad;
                                    }
                                }
                                const auto flat = solve_c_path(GammaPath::constant(gamma), p, g, 5);
                                for (std::size_t t = 0; t < 5; ++t) {
                                    if (std::abs(flat.c_series[t + 1] - flat.c_series[t]) > 1e-12 * flat.c_series[t]) {
                                        ++bad;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        return Outcome{bad == 0 && checked > 0,
                       std::to_string(checked) + " shocked solutions, " + std::to_string(bad) + " violations, "
                           + std::to_string(skipped) + " skipped without equilibrium"};
    });

    criterion("dynamics_oracle_equivalence", [] {
        double worst = 0.0, worst_const = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < 60; ++i) {
            const auto& p = grid()[i];
            const double g0 = p.prefs.gamma();
            const GammaPath paths[] = {
                GammaPath::permanent_step(g0, 0.5, 2),
                GammaPath::transitory_pulse(g0, g0 > 0.6 ? -0.5 : 0.5, 3),
                GammaPath::custom({g0 + 1.0, std::max(0.2, g0 - 0.1), g0 + 3.0}, g0),
            };
            for (const auto& path : paths) {
                if (terminal_h(path, p.prefs, p.growth) >= 1.0) continue;
                const auto s = solve_c_path(path, p.prefs, p.growth, 6);
                for (std::size_t t = 0; t <= s.horizon; ++t) {
                    const double o = forward_series_oracle(path, p.prefs, p.growth, t, 1e-12);
                    worst = std::max(worst, std::abs(s.c_series[t] - o) / o);
                }
                ++n;
            }
            const auto flat = solve_c_path(GammaPath::constant(g0), p.prefs, p.growth, 6);
            const double c = price_dividend_ratio(p.prefs, p.growth);
            for (double ct : flat.c_series) worst_const = std::max(worst_const, std::abs(ct - c) / c);
        }
        const bool ok = worst <= 1e-10 && worst_const <= 1e-12 && n >= 50;
        return Outcome{ok, fmt("recursion vs series max rel %.3g (tol 1e-10), constant vs static %.3g (tol 1e-12)",
                               worst, worst_const)
                               + ", " + std::to_string(n) + " paths"};
    });

    criterion("mc_euler_residuals_dynamic", [&] {
        const auto path = GammaPath::permanent_step(2.0, 0.5, 1);
        const auto sol = solve_c_path(path, std_prefs, std_growth, 12);
        SimulationConfig cfg;
        cfg.n_draws = kDraws;
        cfg.seed = 4242;
        const auto draws = simulate_growth(std_growth, cfg);
        double worst = 0.0;
        for (std::size_t t = 0; t < sol.horizon; ++t) {
            for (auto which : {EulerCondition::Equity, EulerCondition::Bill}) {
                worst = std::max(
                    worst, std::abs(euler_residual_dynamic(std_prefs, path, std_growth, sol, t, which, draws).z_score));
            }
        }
        auto stale = sol;
        const double c_pre = price_dividend_ratio(std_prefs, std_growth);
        for (std::size_t t = path.shock_time(); t <= stale.horizon; ++t) stale.c_series[t] = c_pre;
        double weakest = INFINITY;
        for (std::size_t t = path.shock_time(); t < stale.horizon; ++t) {
            weakest = std::min(weakest, std::abs(euler_residual_dynamic(std_prefs, path, std_growth, stale, t,
                                                                        EulerCondition::Equity, draws)
                                                     .z_score));
        }
        return Outcome{worst < 4.0 && weakest > 3.0,
                       fmt("max |z| %.3f over 12 periods x {20a,20b} (gate 4); stale-c min |z| %.2f (must exceed 3)",
                           worst, weakest)};
    });

    criterion("determinism", [] {
        std::ifstream f(std::string(EZTREE_SCENARIO_DIR) + "/default.scn");
        std::stringstream ss;
        ss << f.rdbuf();
        const auto scenario = parse_scenario(ss.str());
        const cli::Overrides ov{.seed = 31337, .draws = 200'000};
        for (auto c : {cli::Command::Verify, cli::Command::Simulate, cli::Command::Dynamics, cli::Command::Sweep}) {
            const auto a = cli::run_command(c, scenario, cli::OutputFormat::Csv, ov);
            const auto b = cli::run_command(c, scenario, cli::OutputFormat::Csv, ov);
            if (a.out != b.out || a.out.empty()) return Outcome{false, "CSV output differs between identical runs"};
        }
        return Outcome{true, "verify/simulate/dynamics/sweep CSV byte-identical across reruns"};
    });

    std::printf("%s: %d criterion(s) failed\n", g_failures ? "FAILED" : "OK", g_failures);
    return g_failures ? 1 : 0;
}
