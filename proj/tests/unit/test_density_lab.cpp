#include <gtest/gtest.h>

#include <boost/math/distributions/lognormal.hpp>
#include <cmath>

#include "gfrag/area_ensemble.hpp"
#include "gfrag/conditioning.hpp"
#include "gfrag/density_lab.hpp"
#include "reference_model.hpp"

namespace gfrag {
namespace {

using testing::reference_omega_minus;
using testing::reference_omega_plus;
using testing::reference_triplet;

std::vector<double> lognormal_samples(std::size_t n, double sigma, std::uint64_t seed) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(seed, Stream::Auxiliary, i);
        v[i] = std::exp(sigma * rng.normal());
    }
    return v;
}

// P(X > r) = r^{-a} on r >= 1.
std::vector<double> pareto_samples(std::size_t n, double a, std::uint64_t seed) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(seed, Stream::Auxiliary, i);
        v[i] = std::pow(rng.uniform(), -1.0 / a);
    }
    return v;
}

TEST(Density, RecoversLognormal) {
    const auto s = lognormal_samples(20000, 0.6, 1);
    const DensityEstimate est = estimate_density(s);
    EXPECT_NEAR(est.integral(), 1.0, 0.01);
    EXPECT_NEAR(est.first_moment(), std::exp(0.18), 0.03);
    const boost::math::lognormal_distribution<> truth(0.0, 0.6);
    for (double r : {0.5, 0.8, 1.0, 1.5, 2.0}) {
        const double expected = boost::math::pdf(truth, r);
        EXPECT_NEAR(est.value_at(r), expected, 0.05 * expected + 4 * est.std_errors[0] + 0.01) << r;
    }
    // Vanishes at the padded ends.
    EXPECT_LT(est.values.front(), 1e-3 * *std::max_element(est.values.begin(), est.values.end()));
    EXPECT_LT(est.values.back(), 1e-3 * *std::max_element(est.values.begin(), est.values.end()));
}

TEST(Density, PlugInNearNormalReference) {
    // For Gaussian log-samples the optimal bandwidth is 1.06 σ n^{-1/5}.
    const auto s = lognormal_samples(20000, 0.6, 2);
    std::vector<double> z;
    for (double v : s) z.push_back(std::log(v));
    const double reference = 1.06 * 0.6 * std::pow(20000.0, -0.2);
    EXPECT_NEAR(plugin_bandwidth(z), reference, 0.15 * reference);
    EXPECT_NEAR(silverman_bandwidth(z), 0.9 / 1.06 * reference, 0.1 * reference);
}

TEST(Density, RejectsBadInput) {
    EXPECT_THROW(estimate_density(std::vector<double>(5000, 1.0)), std::invalid_argument);
    EXPECT_THROW(estimate_density(lognormal_samples(100, 1.0, 3)), std::invalid_argument);
    auto s = lognormal_samples(2000, 1.0, 3);
    s[7] = -1.0;
    EXPECT_THROW(estimate_density(s), std::invalid_argument);
}

TEST(Density, SizeBiasOfUniform) {
    DensityEstimate est;
    for (int k = 0; k <= 200; ++k) {
        est.grid.push_back(0.01 * k);
        est.values.push_back(0.5);
    }
    const DensityEstimate biased = size_biased_density(est);
    for (std::size_t k = 0; k < est.grid.size(); ++k) EXPECT_DOUBLE_EQ(biased.values[k], est.grid[k] / 2);
    EXPECT_NEAR(biased.integral(), 1.0, 1e-9);
}

TEST(TailFit, ParetoExponentAndConstant) {
    const auto s = pareto_samples(100000, 2.5, 4);
    const TailFit fit = fit_tail(s);
    EXPECT_TRUE(fit.stable);
    EXPECT_NEAR(fit.exponent, 2.5, 3 * fit.exponent_se);
    TailFitOptions with_slope;
    with_slope.slope = 2.5;
    const TailFit fixed = fit_tail(s, with_slope);
    EXPECT_NEAR(fixed.constant, 1.0, 0.1);
    EXPECT_LT(fit.fit_lo, fit.fit_hi);
}

TEST(TailFit, ExponentialHasNoStablePowerLaw) {
    std::vector<double> s(100000);
    for (std::size_t i = 0; i < s.size(); ++i) {
        Rng rng(5, Stream::Auxiliary, i);
        s[i] = rng.exponential();
    }
    const TailFit fit = fit_tail(s);
    const double first = fit.hill_plot.front().second;
    const double last = fit.hill_plot.back().second;
    EXPECT_TRUE(!fit.stable || std::abs(first - last) / fit.exponent > 0.2);
}

TEST(TailFit, ManualWindow) {
    const auto s = pareto_samples(20000, 2.0, 6);
    TailFitOptions o;
    o.window = std::make_pair<std::size_t, std::size_t>(200, 800);
    const TailFit fit = fit_tail(s, o);
    EXPECT_EQ(fit.k_lo, 200u);
    EXPECT_EQ(fit.k_hi, 800u);
    EXPECT_NEAR(fit.exponent, 2.0, 0.25);
}

TEST(WeightedSum, UnitSequenceRecoversPool) {
    const AreaPool pool(lognormal_samples(5000, 0.5, 7));
    const std::vector<double> x = {1.0, 0.0, 0.0};
    const auto s = weighted_sum_samples(x, reference_omega_minus, pool, 5000, 8);
    EXPECT_TRUE(ks_two_sample(s, pool.samples()).passes(0.01));
    EXPECT_THROW(weighted_sum_samples(std::vector<double>{0.0, 0.0}, reference_omega_minus, pool, 10, 8),
                 std::invalid_argument);
}

TEST(WeightedSum, MeanAddsUp) {
    const AreaPool pool(lognormal_samples(5000, 0.5, 9));
    const double pool_mean = mean_estimate(pool.samples()).mean;
    const std::vector<double> x = {1.0, 0.5};
    const auto s = weighted_sum_samples(x, reference_omega_minus, pool, 20000, 10);
    const double expected = pool_mean * (1.0 + std::pow(0.5, reference_omega_minus));
    EXPECT_TRUE(mean_estimate(s).within(expected, 3.0));
}

TEST(Smoothing, DegenerateWeightsReturnInputLaw) {
    const AreaPool pool(lognormal_samples(1000, 0.5, 11));
    const std::vector<double> one = {1.0};
    Rng a(12, Stream::Auxiliary, 0), b(12, Stream::Auxiliary, 0);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(smoothing_transform_draw(one, pool, a), pool.draw(b));
}

TEST(Smoothing, FixpointOnTreeAreas) {
    const TreeModels models(find_cramer_roots(reference_triplet()), PathConfig{});
    TreeOptions o;
    o.policy.mass_floor = 0.02;
    std::vector<double> areas(6000), pool_areas(6000);
    for (std::size_t i = 0; i < areas.size(); ++i) {
        Rng r1(13, Stream::CellTrees, i);
        areas[i] = estimate_area(sample_cell_system(models, o, r1)).area;
        Rng r2(14, Stream::CellTrees, i);
        pool_areas[i] = estimate_area(sample_cell_system(models, o, r2)).area;
    }
    const SmoothingReport report = smoothing_fixpoint_check(areas, models, AreaPool(pool_areas), 6000, 15);
    EXPECT_TRUE(report.ks.passes(0.01)) << report.ks.p_value;
    EXPECT_TRUE(report.transform_mean.within(1.0, 3.0)) << report.transform_mean.mean;
    EXPECT_LT(report.mean_truncated_mass, 1e-4);
}

TEST(Affine, PassageDecompositionMatchesConditionedLaw) {
    const TreeModels models(find_cramer_roots(reference_triplet()), PathConfig{});
    TruncationPolicy policy;
    policy.mass_floor = 0.01;
    const AffineReport report = affine_equation_check(models, 0.5, 2000, policy, 16);
    EXPECT_TRUE(report.ks.passes(0.01)) << report.ks.p_value;
    EXPECT_NEAR(report.passage_probability, report.passage_probability_theory, 3 * report.passage_probability_se);
    EXPECT_EQ(report.conditioned.size(), 2000u);
}

TEST(DensityTail, BinnedFitRecoversPareto) {
    const auto s = pareto_samples(100000, 2.0, 17);
    const DensityTailFit fit = fit_density_tail(s, 2.0, 50.0);
    EXPECT_NEAR(fit.exponent, 2.0, 3 * fit.exponent_se);
    EXPECT_LT(fit.exponent_se, 0.05);
    EXPECT_THROW(fit_density_tail(s, 2.0, 1.0), std::invalid_argument);
}

// P(A_1 + A_2 > r) ~ 2c r^{-s} for independent regularly varying A_j, so the
// density tail constant of the pair sum is 2·c·s. The pool is a mean-one
// Pareto law and the sum is fitted on its top order statistics (r above
// about 20), where the finite-r factor (r/(r-1))^s is below 1.15.
TEST(WeightedSum, PairTailConstantDoubles) {
    const double slope = reference_omega_plus / reference_omega_minus;
    std::vector<double> samples = pareto_samples(2000000, slope, 18);
    for (double& v : samples) v *= (slope - 1.0) / slope;
    const AreaPool pool(std::move(samples));
    TailFitOptions o;
    o.slope = slope;
    const double c = fit_tail(pool.samples(), o).constant;
    const std::vector<double> x = {1.0, 1.0};
    const auto sums = weighted_sum_samples(x, reference_omega_minus, pool, 2000000, 19);
    o.window = std::make_pair<std::size_t, std::size_t>(100, 800);
    const TailFit pair = fit_tail(sums, o);
    EXPECT_GT(pair.fit_lo, 15.0);
    EXPECT_NEAR(pair.constant * slope / (2.0 * c * slope), 1.0, 0.25) << pair.constant << " vs 2 x " << c;
}

// Sums for x = (1, ε) and x = (1) are coupled through common draws, so with
// a fixed bandwidth the density distance must shrink with ε.
TEST(WeightedSum, DensityIsContinuousInTheSequence) {
    const AreaPool pool(lognormal_samples(5000, 0.5, 20));
    BandwidthPolicy fixed;
    fixed.kind = BandwidthPolicy::Kind::Fixed;
    fixed.value = 0.1;
    const std::vector<double> one = {1.0};
    const DensityEstimate base = weighted_sum_density(one, reference_omega_minus, pool, 20000, 21, fixed);
    double peak = 0.0;
    for (double v : base.values) peak = std::max(peak, v);
    double previous = std::numeric_limits<double>::infinity();
    for (double eps : {0.25, 0.05, 0.01, 0.002}) {
        const std::vector<double> x = {1.0, eps};
        const auto sums = weighted_sum_samples(x, reference_omega_minus, pool, 20000, 21);
        const LogKde kde(sums, fixed.value);
        double distance = 0.0;
        for (std::size_t i = 0; i < base.grid.size(); ++i) {
            distance = std::max(distance, std::abs(kde.density(base.grid[i]) - base.values[i]));
        }
        EXPECT_LT(distance, previous) << "eps=" << eps;
        previous = distance;
    }
    EXPECT_LT(previous, 0.02 * peak);
}

// Coarse-floor tree areas shared by the tree-based checks below.
class TreeAreas : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        models_ = new TreeModels(find_cramer_roots(reference_triplet()), PathConfig{});
        TruncationPolicy policy;
        policy.mass_floor = 0.02;
        plus_ = new AreaEnsemble(sample_area_ensemble(*models_, TreeLaw::P, 1.0, 20000, policy, 22, 0));
        minus_ = new AreaEnsemble(sample_area_ensemble(*models_, TreeLaw::QMinus, 1.0, 5000, policy, 23, 0));
    }
    static void TearDownTestSuite() {
        delete minus_;
        delete plus_;
        delete models_;
    }
    static TreeModels* models_;
    static AreaEnsemble* plus_;
    static AreaEnsemble* minus_;
};
TreeModels* TreeAreas::models_ = nullptr;
AreaEnsemble* TreeAreas::plus_ = nullptr;
AreaEnsemble* TreeAreas::minus_ = nullptr;

TEST_F(TreeAreas, HalvedBandwidthStaysWithinTwoErrors) {
    const auto& a = plus_->areas;
    const double h = select_bandwidth(a, {});
    const LogKde full(a, h), half(a, 0.5 * h);
    const double lo = quantile(a, 0.05), hi = quantile(a, 0.95);
    for (int i = 0; i <= 50; ++i) {
        const double r = lo * std::pow(hi / lo, i / 50.0);
        EXPECT_LT(std::abs(full.density(r) - half.density(r)), 2.0 * half.std_error(r)) << "r=" << r;
    }
}

TEST_F(TreeAreas, SurvivalAndDensityRoutesAgree) {
    const TailFit survival = fit_tail(plus_->areas);
    const DensityTailFit density = fit_density_tail(plus_->areas, survival.fit_lo, survival.fit_hi, 8);
    const double joint = joint_stderr(survival.exponent_se, density.exponent_se);
    EXPECT_LE(std::abs(survival.exponent - density.exponent), 3.0 * joint)
        << survival.exponent << " vs " << density.exponent;
}

// Resampling P_1 areas in proportion to their size gives the Q⁻_1 law.
TEST_F(TreeAreas, SizeBiasedLawMatchesMinusLaw) {
    Rng rng(24, Stream::Auxiliary, 0);
    const auto picks = systematic_resample(plus_->areas, minus_->size(), rng);
    std::vector<double> biased;
    biased.reserve(picks.size());
    for (std::size_t i : picks) biased.push_back(plus_->areas[i]);
    const KsResult ks = ks_two_sample(biased, minus_->areas);
    EXPECT_TRUE(ks.passes(0.01)) << "D=" << ks.statistic << " p=" << ks.p_value;
}

// A⁺(x) = O(x) as x → 0.
TEST_F(TreeAreas, PrePassageAreaVanishesWithLevel) {
    TruncationPolicy policy;
    policy.mass_floor = 0.02;
    double previous = std::numeric_limits<double>::infinity();
    double first_ratio = 0.0;
    for (double level : {0.4, 0.1, 0.025}) {
        const AffineReport r = affine_equation_check(*models_, level, 400, policy, 25);
        const double mean = r.pre_passage_area.mean;
        EXPECT_LT(mean, previous) << "level " << level;
        previous = mean;
        if (first_ratio == 0.0) first_ratio = mean / level;
        EXPECT_LT(mean / level, 3.0 * first_ratio) << "level " << level;
    }
}

}  // namespace
}  // namespace gfrag
