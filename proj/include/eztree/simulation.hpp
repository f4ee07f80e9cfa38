#pragma once

// Monte Carlo verification of the equilibrium Euler conditions.
//
// Draws are split into `stream_count` fixed substreams, each with its own
// engine keyed by (seed, stream index). Per-stream statistics are merged with
// a fixed pairwise tree, so results do not depend on the number of worker
// threads or their scheduling.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "eztree/dynamics.hpp"
#include "eztree/errors.hpp"
#include "eztree/parallel.hpp"
#include "eztree/pricing.hpp"
#include "eztree/types.hpp"

namespace eztree {

struct SimulationConfig {
    std::size_t n_draws = 1'000'000;
    std::size_t horizon = 40;
    std::uint64_t seed = 20240601;
    std::size_t stream_count = 16;
    bool antithetic = false;
    unsigned threads = 0;  // 0 = hardware concurrency; never affects results

    void validate() const {
        if (n_draws < 2) throw ValidationError("n_draws must be at least 2");
        if (horizon < 1) throw ValidationError("horizon must be positive");
        if (stream_count < 1) throw ValidationError("stream_count must be positive");
        const std::size_t units = antithetic ? n_draws / 2 : n_draws;
        if (antithetic && n_draws % 2 != 0) throw ValidationError("antithetic sampling needs an even n_draws");
        if (stream_count > units) throw ValidationError("stream_count exceeds the number of sampling units");
    }

    friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

namespace detail {

inline std::mt19937_64 substream_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

// Path simulations use a stream index no draw stream can reach.
inline constexpr std::uint64_t kPathStream = ~std::uint64_t{0};

}  // namespace detail

/// Standard normal shocks, partitioned into substreams. With antithetic
/// sampling entries come in (z, -z) pairs and one sampling unit is a pair.
struct StandardNormals {
    std::vector<double> z;
    std::vector<std::size_t> offsets;  // stream k owns [offsets[k], offsets[k+1])
    bool antithetic = false;

    std::size_t size() const noexcept { return z.size(); }
    std::size_t stream_count() const noexcept { return offsets.size() - 1; }
};

inline StandardNormals draw_standard_normals(const SimulationConfig& config) {
    config.validate();
    const std::size_t width = config.antithetic ? 2 : 1;
    const std::size_t units = config.n_draws / width;
    const std::size_t streams = config.stream_count;

    StandardNormals out;
    out.antithetic = config.antithetic;
    out.z.resize(units * width);
    out.offsets.resize(streams + 1);
    for (std::size_t k = 0; k <= streams; ++k) out.offsets[k] = width * (k * units / streams);

    parallel_for(streams, config.threads, [&](std::size_t k) {
        auto engine = detail::substream_engine(config.seed, k);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (std::size_t i = out.offsets[k]; i < out.offsets[k + 1]; i += width) {
            const double z = normal(engine);
            out.z[i] = z;
            if (width == 2) out.z[i + 1] = -z;
        }
    });
    return out;
}

/// Log growth draws ln y = mu + sigma z.
struct GrowthDraws {
    std::vector<double> ln_y;
    std::vector<std::size_t> offsets;
    bool antithetic = false;

    static GrowthDraws from_normals(const GrowthProcess& growth, const StandardNormals& normals) {
        GrowthDraws d;
        d.offsets = normals.offsets;
        d.antithetic = normals.antithetic;
        d.ln_y.resize(normals.size());
        const double mu = growth.mu();
        const double sigma = growth.sigma();
        for (std::size_t i = 0; i < d.ln_y.size(); ++i) d.ln_y[i] = mu + sigma * normals.z[i];
        return d;
    }

    std::size_t size() const noexcept { return ln_y.size(); }
    std::size_t stream_count() const noexcept { return offsets.size() - 1; }
    double y(std::size_t i) const noexcept { return std::exp(ln_y[i]); }
};

inline GrowthDraws simulate_growth(const GrowthProcess& growth, const SimulationConfig& config) {
    return GrowthDraws::from_normals(growth, draw_standard_normals(config));
}

/// One path y_1..y_horizon, drawn from its own dedicated substream.
inline std::vector<double> simulate_growth_path(const GrowthProcess& growth, const SimulationConfig& config) {
    config.validate();
    auto engine = detail::substream_engine(config.seed, detail::kPathStream);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> y(config.horizon);
    for (auto& v : y) v = std::exp(growth.mu() + growth.sigma() * normal(engine));
    return y;
}

/// Sample statistics of f(ln_y[i]) over all draws. Antithetic draws are
/// averaged in pairs before accumulation. Throws NumericalOverflow on the
/// first non-finite value.
template <class Integrand>
RunningStats sample_statistics(const GrowthDraws& draws, Integrand&& f, unsigned threads = 0) {
    const std::size_t streams = draws.stream_count();
    std::vector<RunningStats> per_stream(streams);
    std::vector<std::size_t> bad(streams, std::numeric_limits<std::size_t>::max());
    parallel_for(streams, threads, [&](std::size_t k) {
        RunningStats s;
        const std::size_t width = draws.antithetic ? 2 : 1;
        for (std::size_t i = draws.offsets[k]; i < draws.offsets[k + 1]; i += width) {
            double v = f(draws.ln_y[i]);
            if (width == 2) v = 0.5 * (v + f(draws.ln_y[i + 1]));
            if (!std::isfinite(v)) {
                bad[k] = i;
                return;
            }
            s.add(v);
        }
        per_stream[k] = s;
    });
    for (std::size_t k = 0; k < streams; ++k) {
        if (bad[k] != std::numeric_limits<std::size_t>::max()) {
            throw NumericalOverflow(bad[k], "Euler integrand is not finite; parameters too extreme");
        }
    }
    return pairwise_reduce(std::span<const RunningStats>(per_stream), RunningStats::merge);
}

enum class EulerEquation { Static10a, Static10b, Dynamic20a, Dynamic20b };

inline const char* to_string(EulerEquation e) noexcept {
    switch (e) {
        case EulerEquation::Static10a: return "10a";
        case EulerEquation::Static10b: return "10b";
        case EulerEquation::Dynamic20a: return "20a";
        case EulerEquation::Dynamic20b: return "20b";
    }
    return "?";
}

/// Which of the pair of Euler conditions: the risky-asset one or the bill one.
enum class EulerCondition { Equity, Bill };

struct EulerReport {
    double residual_mean = 0.0;
    double std_error = 0.0;
    double z_score = 0.0;
    EulerEquation equation = EulerEquation::Static10a;
    std::size_t n_draws = 0;

    friend bool operator==(const EulerReport&, const EulerReport&) = default;
};

/// Tolerance for calling a zero-variance residual equal to one.
inline constexpr double kDeterministicResidualTol = 1e-10;

namespace detail {

inline double z_from(double mean, double se) noexcept {
    if (se > 0.0) return (mean - 1.0) / se;
    const double gap = mean - 1.0;
    if (std::abs(gap) <= kDeterministicResidualTol) return 0.0;
    return gap > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

// Euler integrand in logs:
//   equity: theta ln(beta) - rho theta ln y + theta ln R
//   bill:   theta ln(beta) - rho theta ln y + (theta - 1) ln R + ln R_F
// with ln R = ln_gross_ratio + ln y and ln_gross_ratio = ln((1 + c_next) / c_now).
inline EulerReport euler_report(const Preferences& prefs, double gamma, const GrowthProcess& growth,
                                double ln_gross_ratio, EulerCondition which, EulerEquation id,
                                const GrowthDraws& draws, unsigned threads) {
    const Preferences p = prefs.with_gamma(gamma);
    const double theta = p.euler_exponent();
    const double ln_beta = -p.delta();
    const double rho = p.rho();
    const double r_power = which == EulerCondition::Equity ? theta : theta - 1.0;
    const double ln_rf = which == EulerCondition::Equity ? 0.0 : risk_free_rate(p, growth);
    const double base = theta * ln_beta + r_power * ln_gross_ratio + ln_rf;
    const double y_coef = -rho * theta + r_power;

    auto integrand = [=](double ln_y) { return std::exp(base + y_coef * ln_y); };
    const RunningStats s = sample_statistics(draws, integrand, threads);
    EulerReport r;
    r.residual_mean = s.mean;
    r.std_error = s.std_error();
    r.z_score = z_from(r.residual_mean, r.std_error);
    r.equation = id;
    r.n_draws = draws.size();
    return r;
}

inline double ln_gross_ratio(double c_now, double c_next) {
    if (!(c_now > 0.0) || !(c_next > 0.0)) throw ValidationError("price-dividend ratios must be positive");
    return std::log1p(c_next) - std::log(c_now);
}

}  // namespace detail

/// Static Euler residual at price-dividend ratio c with R = ((1+c)/c) y.
inline EulerReport euler_residual_static(const Preferences& prefs, const GrowthProcess& growth, double c,
                                         EulerCondition which, const GrowthDraws& draws, unsigned threads = 0) {
    const double g = detail::ln_gross_ratio(c, c);
    return detail::euler_report(prefs, prefs.gamma(), growth, g, which,
                                which == EulerCondition::Equity ? EulerEquation::Static10a : EulerEquation::Static10b,
                                draws, threads);
}

inline EulerReport euler_residual_static(const Preferences& prefs, const GrowthProcess& growth, double c,
                                         EulerCondition which, const SimulationConfig& config) {
    return euler_residual_static(prefs, growth, c, which, simulate_growth(growth, config), config.threads);
}

/// Time-t Euler residual under a gamma path: gamma_t from the path,
/// R_{t+1} = ((1 + c_{t+1}) / c_t) y_{t+1}, and ln R_F from gamma_t.
inline EulerReport euler_residual_dynamic(const Preferences& prefs, const GammaPath& path,
                                          const GrowthProcess& growth, const DynamicSolution& solution,
                                          std::size_t t, EulerCondition which, const GrowthDraws& draws,
                                          unsigned threads = 0) {
    if (t + 1 >= solution.c_series.size()) {
        throw ValidationError("period " + std::to_string(t) + " has no successor within the solution horizon");
    }
    const double g = detail::ln_gross_ratio(solution.c_series[t], solution.c_series[t + 1]);
    return detail::euler_report(prefs, path.gamma_at(t), growth, g, which,
                                which == EulerCondition::Equity ? EulerEquation::Dynamic20a
                                                                : EulerEquation::Dynamic20b,
                                draws, threads);
}

inline EulerReport euler_residual_dynamic(const Preferences& prefs, const GammaPath& path,
                                          const GrowthProcess& growth, const DynamicSolution& solution,
                                          std::size_t t, EulerCondition which, const SimulationConfig& config) {
    return euler_residual_dynamic(prefs, path, growth, solution, t, which, simulate_growth(growth, config),
                                  config.threads);
}

/// Inverts the equity Euler condition by bisection on c over [1e-6, 1e6],
/// reusing the same draws for every candidate (common random numbers).
/// Stops when |residual - 1| <= tol or the bracket collapses.
inline double euler_fixed_point_oracle(const Preferences& prefs, const GrowthProcess& growth,
                                       const GrowthDraws& draws, double tol, unsigned threads = 0) {
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    if (prefs.euler_exponent() == 0.0) throw BracketingFailure("Euler residual does not depend on c when gamma = 1");
    auto gap = [&](double c) {
        return euler_residual_static(prefs, growth, c, EulerCondition::Equity, draws, threads).residual_mean - 1.0;
    };
    double lo = 1e-6;
    double hi = 1e6;
    double g_lo = gap(lo);
    const double g_hi = gap(hi);
    if (std::abs(g_lo) <= tol) return lo;
    if (std::abs(g_hi) <= tol) return hi;
    if (!((g_lo < 0.0 && g_hi > 0.0) || (g_lo > 0.0 && g_hi < 0.0))) {
        throw BracketingFailure("Euler residual does not change sign on [1e-6, 1e6]");
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = std::sqrt(lo * hi);  // geometric midpoint: the bracket spans 12 decades
        const double g_mid = gap(mid);
        if (std::abs(g_mid) <= tol || (hi - lo) <= 1e-15 * mid) return mid;
        if ((g_mid < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    return std::sqrt(lo * hi);
}

inline double euler_fixed_point_oracle(const Preferences& prefs, const GrowthProcess& growth,
                                       const SimulationConfig& config, double tol) {
    return euler_fixed_point_oracle(prefs, growth, simulate_growth(growth, config), tol, config.threads);
}

/// Sample moments of R = ((1+c)/c) y, each with its standard error.
struct ReturnMoments {
    double e_ln_r = 0.0;
    double e_ln_r_se = 0.0;
    double ln_e_r = 0.0;
    double ln_e_r_se = 0.0;
    double premium = 0.0;  // ln(mean R) - closed-form ln R_F
    double premium_se = 0.0;
    double var_ln_r = 0.0;
    double var_ln_r_se = 0.0;
    std::size_t n_draws = 0;
};

inline ReturnMoments estimate_return_moments(const Preferences& prefs, const GrowthProcess& growth,
                                             const GrowthDraws& draws, unsigned threads = 0) {
    const double c = price_dividend_ratio(prefs, growth);
    const double ln_g = std::log1p(1.0 / c);

    const RunningStats log_r = sample_statistics(draws, [=](double ln_y) { return ln_g + ln_y; }, threads);
    const RunningStats gross_r =
        sample_statistics(draws, [=](double ln_y) { return std::exp(ln_g + ln_y); }, threads);

    // Variance of ln R over individual draws, pooled in the same stream order.
    GrowthDraws plain = draws;
    plain.antithetic = false;
    const RunningStats log_r_all = sample_statistics(plain, [=](double ln_y) { return ln_g + ln_y; }, threads);

    ReturnMoments m;
    m.n_draws = draws.size();
    m.e_ln_r = log_r.mean;
    m.e_ln_r_se = log_r.std_error();
    m.ln_e_r = std::log(gross_r.mean);
    m.ln_e_r_se = gross_r.std_error() / gross_r.mean;  // delta method
    m.premium = m.ln_e_r - risk_free_rate(prefs, growth);
    m.premium_se = m.ln_e_r_se;
    m.var_ln_r = log_r_all.variance();
    m.var_ln_r_se = m.var_ln_r * std::sqrt(2.0 / static_cast<double>(log_r_all.count - 1));
    return m;
}

inline ReturnMoments estimate_return_moments(const Preferences& prefs, const GrowthProcess& growth,
                                             const SimulationConfig& config) {
    return estimate_return_moments(prefs, growth, simulate_growth(growth, config), config.threads);
}

enum class FdTarget { LnER, LnRF, Premium, C };
enum class FdMode { GammaOnly, GammaRhoDiagonal };

/// Central difference of a closed-form quantity in gamma (rho fixed) or along
/// the direction that moves gamma and rho together.
inline double finite_difference_derivative(const Preferences& prefs, const GrowthProcess& growth, FdTarget target,
                                           FdMode mode, double step) {
    if (!(step > 0.0)) throw ValidationError("finite difference step must be positive");
    if (prefs.gamma() - step <= 0.0) throw ValidationError("gamma - step must stay positive");
    if (mode == FdMode::GammaRhoDiagonal) {
        if (prefs.rho() - step <= 1.0 && 1.0 <= prefs.rho() + step) {
            throw StepCrossesSingularity("diagonal step brackets rho = 1");
        }
        if (prefs.rho() - step <= 0.0) throw ValidationError("rho - step must stay positive");
    }
    auto eval = [&](const Preferences& p) {
        switch (target) {
            case FdTarget::LnER: return expected_returns(p, growth).ln_e_r;
            case FdTarget::LnRF: return risk_free_rate(p, growth);
            case FdTarget::Premium: return equity_premium(p, growth);
            case FdTarget::C: return price_dividend_ratio(p, growth);
        }
        return 0.0;
    };
    auto shifted = [&](double s) {
        const Preferences p = prefs.with_gamma(prefs.gamma() + s);
        return mode == FdMode::GammaOnly ? p : p.with_rho(prefs.rho() + s);
    };
    return (eval(shifted(step)) - eval(shifted(-step))) / (2.0 * step);
}

}  // namespace eztree
