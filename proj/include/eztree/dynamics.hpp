#pragma once

// Comparative dynamics under a deterministic, eventually-constant path of
// risk aversion gamma_t. The price-dividend ratio obeys
//
//     c_t = h_t (1 + c_{t+1}),
//     h_t = exp[-delta + (1-rho) mu + (1-rho)(1-gamma_t) sigma2 / 2],
//
// whose forward solution is c_t = sum_{n>=0} prod_{j=0..n} h_{t+j}.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eztree/errors.hpp"
#include "eztree/pricing.hpp"
#include "eztree/types.hpp"

namespace eztree {

enum class PathKind { Constant, PermanentStep, TransitoryPulse, Custom };

inline const char* to_string(PathKind k) noexcept {
    switch (k) {
        case PathKind::Constant: return "constant";
        case PathKind::PermanentStep: return "permanent";
        case PathKind::TransitoryPulse: return "transitory";
        case PathKind::Custom: return "custom";
    }
    return "?";
}

enum class ShockKind { Permanent, Transitory };

/// Deterministic risk-aversion schedule. Period 0 is "now".
class GammaPath {
public:
    static GammaPath constant(double gamma) {
        GammaPath p(PathKind::Constant, gamma, 0.0, 0);
        p.validate();
        return p;
    }

    /// gamma_t = base for t < shock_time, base + delta for t >= shock_time.
    static GammaPath permanent_step(double base, double delta, std::size_t shock_time = 1) {
        GammaPath p(PathKind::PermanentStep, base, delta, shock_time);
        p.validate();
        return p;
    }

    /// gamma_t = base + delta at t == shock_time only.
    static GammaPath transitory_pulse(double base, double delta, std::size_t shock_time = 1) {
        GammaPath p(PathKind::TransitoryPulse, base, delta, shock_time);
        p.validate();
        return p;
    }

    /// gamma_t = values[t] for t < values.size(), terminal afterwards.
    static GammaPath custom(std::vector<double> values, double terminal) {
        GammaPath p(PathKind::Custom, terminal, 0.0, 0);
        p.custom_values_ = std::move(values);
        p.validate();
        return p;
    }

    PathKind kind() const noexcept { return kind_; }
    double base_gamma() const noexcept { return base_; }
    double shock_delta() const noexcept { return delta_; }
    std::size_t shock_time() const noexcept { return shock_time_; }
    const std::vector<double>& custom_values() const noexcept { return custom_values_; }

    double gamma_at(std::size_t t) const noexcept {
        switch (kind_) {
            case PathKind::Constant: return base_;
            case PathKind::PermanentStep: return t < shock_time_ ? base_ : base_ + delta_;
            case PathKind::TransitoryPulse: return t == shock_time_ ? base_ + delta_ : base_;
            case PathKind::Custom: return t < custom_values_.size() ? custom_values_[t] : base_;
        }
        return base_;
    }

    /// First period T* with gamma_t = terminal_gamma() for every t >= T*.
    std::size_t settle_time() const noexcept {
        switch (kind_) {
            case PathKind::Constant: return 0;
            case PathKind::PermanentStep: return shock_time_;
            case PathKind::TransitoryPulse: return shock_time_ + 1;
            case PathKind::Custom: return custom_values_.size();
        }
        return 0;
    }

    double terminal_gamma() const noexcept {
        return kind_ == PathKind::PermanentStep ? base_ + delta_ : base_;
    }

    friend bool operator==(const GammaPath&, const GammaPath&) = default;

private:
    GammaPath(PathKind kind, double base, double delta, std::size_t shock_time)
        : kind_(kind), base_(base), delta_(delta), shock_time_(shock_time) {}

    void validate() const {
        auto check = [](double g, const char* what) {
            if (!std::isfinite(g) || g <= 0.0) {
                throw ValidationError(std::string(what) + " must be positive");
            }
        };
        check(base_, kind_ == PathKind::Custom ? "terminal gamma" : "base gamma");
        if (!std::isfinite(delta_)) throw ValidationError("shock delta must be finite");
        if (kind_ == PathKind::PermanentStep || kind_ == PathKind::TransitoryPulse) {
            if (shock_time_ < 1) throw ValidationError("shock time must be at least 1");
            check(base_ + delta_, "shocked gamma");
        }
        for (double g : custom_values_) check(g, "custom gamma value");
    }

    PathKind kind_;
    double base_;
    double delta_;
    std::size_t shock_time_;
    std::vector<double> custom_values_;
};

struct DynamicSolution {
    std::vector<double> gamma_series;  // gamma_t, t = 0..horizon
    std::vector<double> h_series;      // h_t, t = 0..horizon
    std::vector<double> c_series;      // c_t, t = 0..horizon
    std::size_t horizon = 0;
    double terminal_c = 0.0;
};

/// h_t for t = 0..horizon.
inline std::vector<double> h_path(const GammaPath& path, const Preferences& prefs,
                                  const GrowthProcess& growth, std::size_t horizon) {
    std::vector<double> h(horizon + 1);
    for (std::size_t t = 0; t <= horizon; ++t) {
        h[t] = h_value(prefs.with_gamma(path.gamma_at(t)), growth);
    }
    return h;
}

/// h at the terminal constant gamma.
inline double terminal_h(const GammaPath& path, const Preferences& prefs, const GrowthProcess& growth) {
    return h_value(prefs.with_gamma(path.terminal_gamma()), growth);
}

/// Backward recursion from the terminal closed form. Transient h_t >= 1 is
/// fine; only h at the terminal gamma must be below one.
inline DynamicSolution solve_c_path(const GammaPath& path, const Preferences& prefs,
                                    const GrowthProcess& growth, std::size_t horizon) {
    if (horizon < path.settle_time()) {
        throw ValidationError("horizon " + std::to_string(horizon) + " is shorter than the settle time "
                              + std::to_string(path.settle_time()) + " of the gamma path");
    }
    DynamicSolution s;
    s.horizon = horizon;
    s.terminal_c = ratio_from_h(terminal_h(path, prefs, growth));
    s.gamma_series.resize(horizon + 1);
    for (std::size_t t = 0; t <= horizon; ++t) s.gamma_series[t] = path.gamma_at(t);
    s.h_series = h_path(path, prefs, growth, horizon);
    s.c_series.assign(horizon + 1, s.terminal_c);
    for (std::size_t t = horizon; t-- > 0;) {
        s.c_series[t] = s.h_series[t] * (1.0 + s.c_series[t + 1]);
    }
    return s;
}

/// Literal forward series for c_t, summed term by term until the geometric
/// tail bound P h_inf / (1 - h_inf) falls below `truncation_tol`, where P is
/// the running product. Independent of solve_c_path.
inline double forward_series_oracle(const GammaPath& path, const Preferences& prefs,
                                    const GrowthProcess& growth, std::size_t t, double truncation_tol) {
    if (!(truncation_tol > 0.0)) throw ValidationError("truncation tolerance must be positive");
    const double h_inf = terminal_h(path, prefs, growth);
    if (!(h_inf < 1.0)) {
        throw NoEquilibrium("terminal h >= 1: forward price-dividend series diverges");
    }
    const std::size_t settle = path.settle_time();
    double product = 1.0;
    double sum = 0.0;
    double carry = 0.0;  // Neumaier compensation
    for (std::size_t k = t;; ++k) {
        product *= h_value(prefs.with_gamma(path.gamma_at(k)), growth);
        const double next = sum + product;
        carry += std::abs(sum) >= product ? (sum - next) + product : (product - next) + sum;
        sum = next;
        if (k + 1 >= settle && product * h_inf / (1.0 - h_inf) <= truncation_tol) break;
    }
    return sum + carry;
}

/// Sign of the post-shock price move. Identical for permanent and transitory
/// shocks: h at the shocked date scales by exp[-delta (1-rho) sigma2 / 2].
inline PriceResponse classify_price_response(double shock_delta, const Preferences& prefs,
                                             const GrowthProcess& growth, ShockKind /*kind*/) {
    const double s = shock_delta * (1.0 - prefs.rho()) * growth.sigma2();
    if (s > 0.0) return PriceResponse::Falls;
    if (s < 0.0) return PriceResponse::Rises;
    return PriceResponse::Unchanged;
}

/// p_t = c_t q_t.
inline std::vector<double> price_path(const DynamicSolution& solution, std::span<const double> dividends) {
    if (dividends.size() != solution.c_series.size()) {
        throw LengthMismatch("dividend path has " + std::to_string(dividends.size())
                             + " entries, expected horizon + 1 = " + std::to_string(solution.c_series.size()));
    }
    std::vector<double> p(dividends.size());
    std::transform(solution.c_series.begin(), solution.c_series.end(), dividends.begin(), p.begin(),
                   [](double c, double q) { return c * q; });
    return p;
}

/// Gross returns R_{t+1} = ((1 + c_{t+1}) / c_t) y_{t+1} for t = 0..horizon-1.
/// `growth_path[t]` holds y_{t+1}.
inline std::vector<double> returns_path(const DynamicSolution& solution, std::span<const double> growth_path) {
    if (growth_path.size() != solution.horizon) {
        throw LengthMismatch("growth path has " + std::to_string(growth_path.size())
                             + " entries, expected horizon = " + std::to_string(solution.horizon));
    }
    std::vector<double> r(growth_path.size());
    for (std::size_t t = 0; t < r.size(); ++t) {
        r[t] = (1.0 + solution.c_series[t + 1]) / solution.c_series[t] * growth_path[t];
    }
    return r;
}

/// ln R_F at period t: the static formula with gamma_t.
inline double risk_free_rate_at(const DynamicSolution& solution, const Preferences& prefs,
                                const GrowthProcess& growth, std::size_t t) {
    return risk_free_rate(prefs.with_gamma(solution.gamma_series.at(t)), growth);
}

}  // namespace eztree
