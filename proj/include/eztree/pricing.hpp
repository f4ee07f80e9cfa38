#pragma once

// Closed-form equilibrium of the Lucas tree under Epstein-Zin preferences with
// i.i.d. lognormal dividend growth. All rates are per-period natural logs.

#include <cmath>

#include "eztree/errors.hpp"
#include "eztree/types.hpp"

namespace eztree {

/// Log of the fixed-point right-hand side,
/// ln h = -delta + (1-rho) mu + (1/2)(1-rho)(1-gamma) sigma2.
inline double log_h_value(const Preferences& prefs, const GrowthProcess& growth) noexcept {
    const double one_m_rho = 1.0 - prefs.rho();
    return -prefs.delta() + one_m_rho * growth.mu()
           + 0.5 * one_m_rho * (1.0 - prefs.gamma()) * growth.sigma2();
}

/// h = c/(1+c), the discount applied to next period's (price + dividend).
inline double h_value(const Preferences& prefs, const GrowthProcess& growth) noexcept {
    return std::exp(log_h_value(prefs, growth));
}

/// Unique positive c solving c/(1+c) = h. Throws NoEquilibrium when h >= 1.
inline double ratio_from_h(double h) {
    if (!(h < 1.0)) {
        throw NoEquilibrium("h = " + std::to_string(h)
                            + " >= 1: the price-dividend series diverges, no finite price exists");
    }
    return h / (1.0 - h);
}

inline double price_dividend_ratio(const Preferences& prefs, const GrowthProcess& growth) {
    return ratio_from_h(h_value(prefs, growth));
}

/// ln R_F = delta + rho (mu + sigma2/2) - (1/2) gamma (1+rho) sigma2.
inline double risk_free_rate(const Preferences& prefs, const GrowthProcess& growth) noexcept {
    return prefs.delta() + prefs.rho() * growth.log_mean_growth()
           - 0.5 * prefs.gamma() * (1.0 + prefs.rho()) * growth.sigma2();
}

/// ln E(R) - ln R_F = gamma sigma2.
inline double equity_premium(const Preferences& prefs, const GrowthProcess& growth) noexcept {
    return prefs.gamma() * growth.sigma2();
}

struct ExpectedReturns {
    double e_ln_r;  // E(ln R)
    double ln_e_r;  // ln E(R)
};

/// E(ln R) = delta + rho mu - (1/2)(1-rho)(1-gamma) sigma2, and
/// ln E(R) = E(ln R) + sigma2/2 since V(ln R) = V(ln y) = sigma2.
inline ExpectedReturns expected_returns(const Preferences& prefs, const GrowthProcess& growth) noexcept {
    const double e_ln_r = prefs.delta() + prefs.rho() * growth.mu()
                          - 0.5 * (1.0 - prefs.rho()) * (1.0 - prefs.gamma()) * growth.sigma2();
    return {e_ln_r, e_ln_r + 0.5 * growth.sigma2()};
}

/// p = c q.
inline double price(const Preferences& prefs, const GrowthProcess& growth, double dividend) {
    if (!(dividend > 0.0) || !std::isfinite(dividend)) {
        throw ValidationError("dividend must be positive and finite");
    }
    return price_dividend_ratio(prefs, growth) * dividend;
}

/// Price written through the expected return, p = k q / (1 - k) with
/// k = exp[mu + sigma2/2 - ln E(R)]. Algebraically k = h; kept as a separate
/// route so the two can be checked against each other.
inline double price_from_expected_return(const Preferences& prefs, const GrowthProcess& growth,
                                         double dividend) {
    if (!(dividend > 0.0) || !std::isfinite(dividend)) {
        throw ValidationError("dividend must be positive and finite");
    }
    const double k = std::exp(growth.mu() + 0.5 * growth.sigma2() - expected_returns(prefs, growth).ln_e_r);
    if (!(k < 1.0)) {
        throw NoEquilibrium("expected-return discount factor >= 1");
    }
    return k * dividend / (1.0 - k);
}

/// Consumption-wealth ratio a = c_t / w_t = q / (p + q) = 1/(1+c).
inline double consumption_wealth_ratio(const Preferences& prefs, const GrowthProcess& growth) {
    return 1.0 / (1.0 + price_dividend_ratio(prefs, growth));
}

struct Equilibrium {
    double h;
    double c;
    double ln_rf;
    double e_ln_r;
    double ln_e_r;
    double premium;
    double a;
};

inline Equilibrium solve_equilibrium(const Preferences& prefs, const GrowthProcess& growth) {
    const double h = h_value(prefs, growth);
    const double c = ratio_from_h(h);
    const auto er = expected_returns(prefs, growth);
    return {h, c, risk_free_rate(prefs, growth), er.e_ln_r, er.ln_e_r, equity_premium(prefs, growth),
            1.0 / (1.0 + c)};
}

}  // namespace eztree
