#pragma once

// Comparative statics of expected returns and prices in risk aversion.

#include <cmath>

#include "eztree/errors.hpp"
#include "eztree/types.hpp"

namespace eztree {

enum class PricingModel { CCAPM, EpsteinZin };

inline const char* to_string(PricingModel m) noexcept {
    return m == PricingModel::CCAPM ? "ccapm" : "epstein_zin";
}

/// |derivative| below this is reported as Unchanged.
inline constexpr double kSignThreshold = 1e-14;

/// Price moves opposite to ln E(R): a higher required return means a lower price.
inline PriceResponse price_response_from_return_derivative(double d_ln_er) noexcept {
    if (std::abs(d_ln_er) < kSignThreshold) return PriceResponse::Unchanged;
    return d_ln_er > 0.0 ? PriceResponse::Falls : PriceResponse::Rises;
}

struct DerivativeReport {
    double d_ln_er_d_gamma;
    double d_ln_rf_d_gamma;
    double d_premium_d_gamma;
    PriceResponse price_response_sign;
    PricingModel model;
};

/// d ln E(R) / d gamma with rho held fixed: sigma2 (1-rho) / 2.
inline double dlnER_dgamma_ez(const Preferences& prefs, const GrowthProcess& growth) noexcept {
    return 0.5 * growth.sigma2() * (1.0 - prefs.rho());
}

/// d ln E(R) / d gamma along gamma = rho: mu + sigma2 (1-gamma).
inline double dlnER_dgamma_ccapm(const Preferences& prefs, const GrowthProcess& growth) {
    if (!prefs.is_expected_utility()) {
        throw ModelMismatch("expected-utility derivative requires gamma == rho");
    }
    return growth.mu() + growth.sigma2() * (1.0 - prefs.gamma());
}

/// Splits d ln E(R)/d gamma into the risk-free-rate and premium channels.
///
/// EpsteinZin moves gamma alone:  d ln R_F = -(1+rho) sigma2 / 2.
/// CCAPM moves gamma and rho together: d ln R_F = mu - gamma sigma2.
/// In both cases d premium = sigma2.
inline DerivativeReport decompose_dlnER(const Preferences& prefs, const GrowthProcess& growth,
                                        PricingModel model = PricingModel::EpsteinZin) {
    const double s2 = growth.sigma2();
    DerivativeReport r{};
    r.model = model;
    r.d_premium_d_gamma = s2;
    if (model == PricingModel::EpsteinZin) {
        r.d_ln_rf_d_gamma = -0.5 * (1.0 + prefs.rho()) * s2;
    } else {
        if (!prefs.is_expected_utility()) {
            throw ModelMismatch("expected-utility decomposition requires gamma == rho");
        }
        r.d_ln_rf_d_gamma = growth.mu() - prefs.gamma() * s2;
    }
    r.d_ln_er_d_gamma = r.d_ln_rf_d_gamma + r.d_premium_d_gamma;
    r.price_response_sign = price_response_from_return_derivative(r.d_ln_er_d_gamma);
    return r;
}

}  // namespace eztree
