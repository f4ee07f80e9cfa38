#pragma once

#include <cmath>

#include "eztree/errors.hpp"

namespace eztree {

/// Epstein-Zin preference parameters.
///
/// `delta` is the subjective discount rate (beta = exp(-delta)), `rho` the
/// aversion to intertemporal fluctuations (inverse EIS), `gamma` relative risk
/// aversion. rho = 1 is rejected: the Euler exponents (1-gamma)/(1-rho) are
/// singular there and the log-aggregator equilibrium is not modelled.
class Preferences {
public:
    Preferences(double delta, double rho, double gamma) : delta_(delta), rho_(rho), gamma_(gamma) {
        if (!std::isfinite(delta) || delta < 0.0) {
            throw ValidationError("delta must be finite and non-negative");
        }
        if (!std::isfinite(rho) || rho <= 0.0 || rho == 1.0) {
            throw ValidationError("rho must be positive and not equal to 1");
        }
        if (!std::isfinite(gamma) || gamma <= 0.0) {
            throw ValidationError("gamma must be positive");
        }
    }

    static Preferences from_beta(double beta, double rho, double gamma) {
        if (!(beta > 0.0 && beta <= 1.0)) {
            throw ValidationError("beta must lie in (0, 1]");
        }
        return Preferences(-std::log(beta), rho, gamma);
    }

    double delta() const noexcept { return delta_; }
    double rho() const noexcept { return rho_; }
    double gamma() const noexcept { return gamma_; }
    double beta() const noexcept { return std::exp(-delta_); }

    /// Euler exponent (1-gamma)/(1-rho).
    double euler_exponent() const noexcept { return (1.0 - gamma_) / (1.0 - rho_); }

    bool is_expected_utility() const noexcept { return gamma_ == rho_; }

    Preferences with_delta(double d) const { return {d, rho_, gamma_}; }
    Preferences with_rho(double r) const { return {delta_, r, gamma_}; }
    Preferences with_gamma(double g) const { return {delta_, rho_, g}; }

    friend bool operator==(const Preferences&, const Preferences&) = default;

private:
    double delta_;
    double rho_;
    double gamma_;
};

/// i.i.d. lognormal dividend growth: ln y ~ N(mu, sigma2).
class GrowthProcess {
public:
    GrowthProcess(double mu, double sigma2) : mu_(mu), sigma2_(sigma2) {
        if (!std::isfinite(mu)) {
            throw ValidationError("mu must be finite");
        }
        if (!std::isfinite(sigma2) || sigma2 < 0.0) {
            throw ValidationError("sigma2 must be finite and non-negative");
        }
    }

    double mu() const noexcept { return mu_; }
    double sigma2() const noexcept { return sigma2_; }
    double sigma() const noexcept { return std::sqrt(sigma2_); }
    bool deterministic() const noexcept { return sigma2_ == 0.0; }

    /// ln E(y) = mu + sigma2/2.
    double log_mean_growth() const noexcept { return mu_ + 0.5 * sigma2_; }

    GrowthProcess with_mu(double m) const { return {m, sigma2_}; }
    GrowthProcess with_sigma2(double s) const { return {mu_, s}; }

    friend bool operator==(const GrowthProcess&, const GrowthProcess&) = default;

private:
    double mu_;
    double sigma2_;
};

/// Direction of the equilibrium price response to a risk-aversion change.
enum class PriceResponse { Falls, Rises, Unchanged };

inline const char* to_string(PriceResponse r) noexcept {
    switch (r) {
        case PriceResponse::Falls: return "falls";
        case PriceResponse::Rises: return "rises";
        case PriceResponse::Unchanged: return "unchanged";
    }
    return "?";
}

}  // namespace eztree
