#include <cmath>

#include <gtest/gtest.h>

#include "eztree/dynamics.hpp"
#include "eztree/pricing.hpp"
#include "eztree/simulation.hpp"

namespace eztree {
namespace {

const Preferences kStdPrefs{0.02, 0.5, 2.0};
const GrowthProcess kStdGrowth{0.018, 0.0013};

SimulationConfig config(std::size_t n, std::uint64_t seed = 99, std::size_t streams = 8) {
    SimulationConfig c;
    c.n_draws = n;
    c.seed = seed;
    c.stream_count = streams;
    return c;
}

TEST(SimulationConfig, Validation) {
    EXPECT_THROW(config(1).validate(), ValidationError);
    EXPECT_THROW(config(4, 1, 8).validate(), ValidationError);
    auto c = config(11);
    c.antithetic = true;
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(SimulateGrowth, DegenerateDistribution) {
    const auto d = simulate_growth({0.018, 0.0}, config(1000));
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(d.y(i), std::exp(0.018));
}

TEST(SimulateGrowth, SampleMomentsConverge) {
    const auto d = simulate_growth(kStdGrowth, config(1'000'000));
    RunningStats s;
    for (double x : d.ln_y) s.add(x);
    EXPECT_LT(std::abs(s.mean - 0.018), 3.0 * std::sqrt(0.0013 / 1e6));
    EXPECT_LT(std::abs(s.variance() - 0.0013), 3.0 * 0.0013 * std::sqrt(2.0 / 1e6));
}

TEST(SimulateGrowth, SeedReplaysIdenticalDraws) {
    const auto a = simulate_growth(kStdGrowth, config(10'000, 5));
    const auto b = simulate_growth(kStdGrowth, config(10'000, 5));
    const auto c = simulate_growth(kStdGrowth, config(10'000, 6));
    EXPECT_EQ(a.ln_y, b.ln_y);
    EXPECT_NE(a.ln_y, c.ln_y);
}

TEST(SimulateGrowth, ThreadCountDoesNotChangeResults) {
    auto one = config(100'003, 3, 7);
    one.threads = 1;
    auto many = one;
    many.threads = 5;
    const auto a = simulate_growth(kStdGrowth, one);
    const auto b = simulate_growth(kStdGrowth, many);
    EXPECT_EQ(a.ln_y, b.ln_y);
    const double c = price_dividend_ratio(kStdPrefs, kStdGrowth);
    EXPECT_EQ(euler_residual_static(kStdPrefs, kStdGrowth, c, EulerCondition::Equity, a, 1),
              euler_residual_static(kStdPrefs, kStdGrowth, c, EulerCondition::Equity, b, 4));
}

TEST(SimulateGrowth, PooledMeanAgreesAcrossStreamCounts) {
    const auto a = simulate_growth(kStdGrowth, config(400'000, 1, 1));
    const auto b = simulate_growth(kStdGrowth, config(400'000, 1, 32));
    const auto ra = sample_statistics(a, [](double x) { return x; });
    const auto rb = sample_statistics(b, [](double x) { return x; });
    EXPECT_LT(std::abs(ra.mean - rb.mean), 4.0 * std::hypot(ra.std_error(), rb.std_error()));
}

TEST(RunningStats, MergeMatchesSequential) {
    RunningStats all, a, b;
    for (int i = 0; i < 100; ++i) {
        const double x = std::sin(i * 0.7) + 1.0;
        all.add(x);
        (i < 37 ? a : b).add(x);
    }
    const auto m = RunningStats::merge(a, b);
    EXPECT_EQ(m.count, all.count);
    EXPECT_NEAR(m.mean, all.mean, 1e-15);
    EXPECT_NEAR(m.variance(), all.variance(), 1e-14);
}

TEST(EulerResidualStatic, DeterministicFixedPointIsExact) {
    const Preferences p{0.02, 2.0, 3.0};
    const GrowthProcess g{0.01, 0.0};
    const double c = price_dividend_ratio(p, g);
    for (auto which : {EulerCondition::Equity, EulerCondition::Bill}) {
        const auto r = euler_residual_static(p, g, c, which, config(100));
        EXPECT_NEAR(r.residual_mean, 1.0, 1e-12);
        EXPECT_EQ(r.std_error, 0.0);
        EXPECT_EQ(r.z_score, 0.0);
    }
    const auto off = euler_residual_static(p, g, 1.05 * c, EulerCondition::Equity, config(100));
    EXPECT_TRUE(std::isinf(off.z_score));
}

TEST(EulerResidualStatic, StandardPointAtClosedForm) {
    const double c = price_dividend_ratio(kStdPrefs, kStdGrowth);
    const auto draws = simulate_growth(kStdGrowth, config(1'000'000));
    const auto a = euler_residual_static(kStdPrefs, kStdGrowth, c, EulerCondition::Equity, draws);
    const auto b = euler_residual_static(kStdPrefs, kStdGrowth, c, EulerCondition::Bill, draws);
    EXPECT_EQ(a.equation, EulerEquation::Static10a);
    EXPECT_EQ(b.equation, EulerEquation::Static10b);
    EXPECT_EQ(a.n_draws, 1'000'000u);
    EXPECT_GT(a.std_error, 0.0);
    EXPECT_LT(std::abs(a.z_score), 3.0);
    EXPECT_LT(std::abs(b.z_score), 3.0);
}

TEST(EulerResidualStatic, RejectsMisspecifiedRatio) {
    const double c = price_dividend_ratio(kStdPrefs, kStdGrowth);
    const auto draws = simulate_growth(kStdGrowth, config(1'000'000));
    for (double scale : {0.95, 1.05}) {
        const auto r = euler_residual_static(kStdPrefs, kStdGrowth, scale * c, EulerCondition::Equity, draws);
        EXPECT_GT(std::abs(r.z_score), 3.0) << scale;
    }
}

TEST(EulerResidualStatic, AntitheticPairsStayUnbiased) {
    const double c = price_dividend_ratio(kStdPrefs, kStdGrowth);
    auto cfg = config(400'000);
    const auto plain = euler_residual_static(kStdPrefs, kStdGrowth, c, EulerCondition::Bill, cfg);
    cfg.antithetic = true;
    const auto anti = euler_residual_static(kStdPrefs, kStdGrowth, c, EulerCondition::Bill, cfg);
    EXPECT_LT(std::abs(anti.z_score), 3.0);
    EXPECT_LT(anti.std_error, plain.std_error);
    EXPECT_LT(std::abs(anti.residual_mean - plain.residual_mean), 4.0 * std::hypot(anti.std_error, plain.std_error));
}

TEST(EulerResidualStatic, OverflowReportsDraw) {
    const Preferences p{0.1, 0.999, 10.0};  // exponent (1-gamma)/(1-rho) = -9000
    const GrowthProcess g{0.0, 0.01};
    EXPECT_THROW(euler_residual_static(p, g, 1e6, EulerCondition::Equity, config(1000)), NumericalOverflow);
}

TEST(EulerFixedPointOracle, RecoversClosedFormWithinMonteCarloError) {
    const auto draws = simulate_growth(kStdGrowth, config(1'000'000));
    const double c_mc = euler_fixed_point_oracle(kStdPrefs, kStdGrowth, draws, 1e-12);
    const double c = price_dividend_ratio(kStdPrefs, kStdGrowth);
    // Delta method: SE(c) = SE(residual) / |d residual / dc|.
    const auto r = euler_residual_static(kStdPrefs, kStdGrowth, c_mc, EulerCondition::Equity, draws);
    const double dc = 1e-3 * c_mc;
    const double slope =
        (euler_residual_static(kStdPrefs, kStdGrowth, c_mc + dc, EulerCondition::Equity, draws).residual_mean
         - euler_residual_static(kStdPrefs, kStdGrowth, c_mc - dc, EulerCondition::Equity, draws).residual_mean)
        / (2 * dc);
    EXPECT_LT(std::abs(c_mc - c), 3.0 * r.std_error / std::abs(slope));
    EXPECT_NEAR(c_mc, 87.80, 0.6);
}

TEST(EulerFixedPointOracle, DeterministicCaseIsExact) {
    const Preferences p{0.02, 2.0, 3.0};
    const GrowthProcess g{0.01, 0.0};
    const double c = euler_fixed_point_oracle(p, g, config(10), 1e-14);
    EXPECT_NEAR(c, price_dividend_ratio(p, g), 1e-9 * c);
}

TEST(EulerFixedPointOracle, ResidualMonotoneInRatio) {
    const auto draws = simulate_growth(kStdGrowth, config(20'000));
    for (double rho : {0.5, 2.0}) {
        for (double gamma : {0.5, 4.0}) {
            const Preferences p{0.02, rho, gamma};
            const double dir = p.euler_exponent() > 0 ? -1.0 : 1.0;
            double prev = NAN;
            for (double c = 1.0; c < 1e4; c *= 1.5) {
                const double r = euler_residual_static(p, kStdGrowth, c, EulerCondition::Equity, draws).residual_mean;
                if (!std::isnan(prev)) {
                    EXPECT_GT(dir * (r - prev), 0.0) << rho << " " << gamma << " " << c;
                }
                prev = r;
            }
        }
    }
}

TEST(EulerFixedPointOracle, GammaOneIsUnbracketable) {
    EXPECT_THROW(euler_fixed_point_oracle({0.02, 0.5, 1.0}, kStdGrowth, config(1000), 1e-12), BracketingFailure);
}

TEST(EulerResidualDynamic, ConstantPathReducesToStatic) {
    const double c = price_dividend_ratio(kStdPrefs, kStdGrowth);
    const auto path = GammaPath::constant(2.0);
    const auto sol = solve_c_path(path, kStdPrefs, kStdGrowth, 5);
    const auto draws = simulate_growth(kStdGrowth, config(50'000));
    const auto s = euler_residual_static(kStdPrefs, kStdGrowth, c, EulerCondition::Bill, draws);
    const auto d = euler_residual_dynamic(kStdPrefs, path, kStdGrowth, sol, 2, EulerCondition::Bill, draws);
    EXPECT_EQ(d.equation, EulerEquation::Dynamic20b);
    EXPECT_NEAR(d.residual_mean, s.residual_mean, 1e-12);
    EXPECT_NEAR(d.std_error, s.std_error, 1e-12);
}

TEST(EulerResidualDynamic, PermanentStepSolutionAndStalePowerCheck) {
    const auto path = GammaPath::permanent_step(2.0, 0.5, 1);
    const auto sol = solve_c_path(path, kStdPrefs, kStdGrowth, 6);
    const auto draws = simulate_growth(kStdGrowth, config(1'000'000));
    for (std::size_t t = 0; t < sol.horizon; ++t) {
        for (auto which : {EulerCondition::Equity, EulerCondition::Bill}) {
            const auto r = euler_residual_dynamic(kStdPrefs, path, kStdGrowth, sol, t, which, draws);
            EXPECT_LT(std::abs(r.z_score), 4.0) << "t=" << t;
        }
    }
    auto stale = sol;
    const double c_pre = price_dividend_ratio(kStdPrefs, kStdGrowth);
    for (std::size_t t = 1; t <= stale.horizon; ++t) stale.c_series[t] = c_pre;
    const auto r = euler_residual_dynamic(kStdPrefs, path, kStdGrowth, stale, 1, EulerCondition::Equity, draws);
    EXPECT_GT(std::abs(r.z_score), 3.0);
    EXPECT_THROW(euler_residual_dynamic(kStdPrefs, path, kStdGrowth, sol, 6, EulerCondition::Equity, draws),
                 ValidationError);
}

TEST(EstimateReturnMoments, DeterministicIsExact) {
    const Preferences p{0.02, 2.0, 3.0};
    const GrowthProcess g{0.01, 0.0};
    const auto m = estimate_return_moments(p, g, config(100));
    const auto e = solve_equilibrium(p, g);
    EXPECT_NEAR(m.e_ln_r, e.e_ln_r, 1e-14);
    EXPECT_NEAR(m.ln_e_r, e.ln_e_r, 1e-14);
    EXPECT_NEAR(m.premium, 0.0, 1e-14);
}

TEST(EstimateReturnMoments, WithinThreeStandardErrors) {
    for (double gamma : {2.0, 10.0}) {
        const Preferences p{0.02, 0.5, gamma};
        const auto e = solve_equilibrium(p, kStdGrowth);
        const auto m = estimate_return_moments(p, kStdGrowth, config(1'000'000, 17));
        EXPECT_LT(std::abs(m.e_ln_r - e.e_ln_r), 3.0 * m.e_ln_r_se);
        EXPECT_LT(std::abs(m.ln_e_r - e.ln_e_r), 3.0 * m.ln_e_r_se);
        EXPECT_LT(std::abs(m.premium - gamma * 0.0013), 3.0 * m.premium_se);
        EXPECT_LT(std::abs(m.var_ln_r - 0.0013), 3.0 * m.var_ln_r_se);
    }
}

TEST(FiniteDifference, ModesAndErrors) {
    const GrowthProcess riskless{0.018, 0.0};
    const Preferences p{0.02, 2.0, 2.0};
    EXPECT_NEAR(finite_difference_derivative(p, riskless, FdTarget::LnER, FdMode::GammaOnly, 1e-4), 0.0, 1e-12);
    EXPECT_NEAR(finite_difference_derivative(p, riskless, FdTarget::LnRF, FdMode::GammaOnly, 1e-4), 0.0, 1e-12);
    EXPECT_NEAR(finite_difference_derivative(p, riskless, FdTarget::Premium, FdMode::GammaOnly, 1e-4), 0.0, 1e-12);
    EXPECT_NEAR(finite_difference_derivative(p, riskless, FdTarget::C, FdMode::GammaOnly, 1e-4), 0.0, 1e-9);
    EXPECT_NEAR(finite_difference_derivative(p, riskless, FdTarget::LnER, FdMode::GammaRhoDiagonal, 1e-4), 0.018,
                1e-10);
    EXPECT_THROW(finite_difference_derivative({0.02, 1.00005, 2.0}, kStdGrowth, FdTarget::LnER,
                                              FdMode::GammaRhoDiagonal, 1e-4),
                 StepCrossesSingularity);
    EXPECT_THROW(finite_difference_derivative({0.02, 2.0, 5e-5}, kStdGrowth, FdTarget::LnER, FdMode::GammaOnly, 1e-4),
                 ValidationError);
    EXPECT_NEAR(finite_difference_derivative(kStdPrefs, kStdGrowth, FdTarget::Premium, FdMode::GammaOnly, 1e-4),
                0.0013, 1e-10);
}

}  // namespace
}  // namespace eztree
