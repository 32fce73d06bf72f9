#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "gfrag/path_sim.hpp"
#include "gfrag/stats.hpp"
#include "reference_model.hpp"

namespace gfrag {
namespace {

using testing::reference_omega_minus;
using testing::reference_omega_plus;
using testing::reference_triplet;

const CumulantProfile& profile() {
    static const CumulantProfile p = find_cramer_roots(reference_triplet());
    return p;
}

double cutoff() { return PathConfig{}.cutoff_u(); }

TEST(PathModel, MatchedExponentAgreesWithPsiAtBothRoots) {
    const PathModel m = PathModel::build(profile(), ExponentKind::Psi, cutoff());
    EXPECT_GT(m.gaussian_variance(), 0.0);
    EXPECT_NEAR(m.exponent(reference_omega_minus).value(), profile().psi(reference_omega_minus), 1e-9);
    EXPECT_NEAR(m.exponent(reference_omega_plus).value(), profile().psi(reference_omega_plus), 1e-9);
}

TEST(PathModel, SimulatedCumulantVanishesAtBothRoots) {
    const PathModel m = PathModel::build(profile(), ExponentKind::Psi, cutoff());
    for (double w : {reference_omega_minus, reference_omega_plus}) {
        const double kappa = m.exponent(w).value() + m.jumps().partial_moment(w, 0.0, 1.0);
        EXPECT_NEAR(kappa, 0.0, 1e-9) << "w=" << w;
    }
}

TEST(PathModel, ApproximationErrorIsSmallBetweenRoots) {
    const PathModel m = PathModel::build(profile(), ExponentKind::Psi, cutoff());
    for (double q : {1.0, 2.0, 2.7, 3.0}) {
        EXPECT_NEAR(m.exponent(q).value(), profile().psi(q), 5e-3) << "q=" << q;
    }
}

TEST(PathModel, TiltedExponentsAreShiftedCumulants) {
    const PathModel psi = PathModel::build(profile(), ExponentKind::Psi, cutoff());
    const PathModel minus = PathModel::build(profile(), ExponentKind::PhiMinus, cutoff());
    const PathModel plus = PathModel::build(profile(), ExponentKind::PhiPlus, cutoff());
    auto kappa_sim = [&](double q) { return psi.exponent(q).value() + psi.jumps().partial_moment(q, 0.0, 1.0); };
    for (double q : {0.1, 0.5, 1.0, 2.0}) {
        EXPECT_NEAR(minus.exponent(q).value(), kappa_sim(q + reference_omega_minus), 1e-8) << q;
        EXPECT_NEAR(plus.exponent(q).value(), kappa_sim(q + reference_omega_plus), 1e-8) << q;
    }
    EXPECT_NEAR(minus.exponent(reference_omega_plus - reference_omega_minus).value(), 0.0, 1e-9);
    EXPECT_NEAR(minus.exponent(0.0).value(), 0.0, 1e-12);
    EXPECT_NEAR(plus.exponent(0.0).value(), 0.0, 1e-12);
}

TEST(PathModel, TiltedExponentIsInfiniteWhereCumulantIs) {
    const PathModel minus = PathModel::build(profile(), ExponentKind::PhiMinus, cutoff());
    // q + ω₋ < 1 + ρ.
    EXPECT_TRUE(minus.exponent(-0.2).is_infinite());
}

TEST(PathModel, BrownianReduction) {
    LevyTriplet t;
    t.sigma2 = 1.5;
    t.drift = -0.25;
    const PathModel m = PathModel::build_matched(t, cutoff(), 1.0, 2.0);
    EXPECT_EQ(m.gaussian_variance(), 1.5);
    EXPECT_EQ(m.drift(), -0.25);
    EXPECT_EQ(m.jump_rate(), 0.0);
    EXPECT_DOUBLE_EQ(m.exponent(2.0).value(), 0.5 * 1.5 * 4.0 - 0.5);
}

TEST(PathModel, RejectsCutoffOutsideUnitInterval) {
    EXPECT_THROW(PathModel::build(profile(), ExponentKind::Psi, 1.0), std::invalid_argument);
    EXPECT_THROW(PathModel::build(profile(), ExponentKind::Psi, 0.0), std::invalid_argument);
}

TEST(BridgeIntegral, DegenerateAndFlatCases) {
    EXPECT_NEAR(bridge_exponential_integral(0.3, 0.3, 2.0, 1.5, 0.0), 2.0 * std::exp(0.45), 1e-12);
    // a != b, v = 0: ∫_0^h e^{p(a + (b-a)r/h)} dr.
    const double exact = (std::exp(2.0) - std::exp(1.0)) * 0.1;
    EXPECT_NEAR(bridge_exponential_integral(1.0, 2.0, 0.1, 1.0, 0.0), exact, 1e-12);
}

TEST(BridgeIntegral, MatchesAdaptiveQuadrature) {
    const double a = -0.4, b = 0.1, h = 0.05, p = 2.7, v = 2.2;
    auto f = [=](double r) {
        return std::exp(p * (a + (b - a) * r / h) + 0.5 * p * p * v * r * (h - r) / h);
    };
    const double oracle =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, h, 10, 1e-14);
    EXPECT_NEAR(bridge_exponential_integral(a, b, h, p, v), oracle, 1e-9 * oracle);
}

TEST(BridgeCrossing, Limits) {
    EXPECT_EQ(bridge_crossing_probability(0.0, 1.0, 1.0, 1.0, 0.5), 1.0);
    EXPECT_EQ(bridge_crossing_probability(0.0, 0.0, 1.0, 0.0, 0.5), 0.0);
    EXPECT_NEAR(bridge_crossing_probability(0.0, 0.0, 1.0, 1.0, 0.5), std::exp(-0.5), 1e-15);
    EXPECT_DOUBLE_EQ(bridge_crossing_probability(-0.2, 0.1, 0.3, 2.0, 0.4),
                     bridge_crossing_probability(0.1, -0.2, 0.3, 2.0, 0.4));
}

struct EndValue {
    double x = 0.0;
    bool segment(double, double, double, double x1) {
        x = x1;
        return true;
    }
    bool jump(const PathJump& j) {
        x = j.level_before + j.size;
        return true;
    }
};

// E[e^{qξ(1)}] = e^{exponent(q)} for each simulated law.
void check_exponential_moment(ExponentKind kind, double q, std::uint64_t seed) {
    const PathModel m = PathModel::build(profile(), kind, cutoff());
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        Rng rng(seed, Stream::Auxiliary, static_cast<std::uint64_t>(i));
        EndValue v;
        run_path(m, 1.0, 0.05, rng, v);
        const double w = std::exp(q * v.x);
        sum += w;
        sum2 += w * w;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    const double expected = std::exp(m.exponent(q).value());
    EXPECT_NEAR(mean, expected, 4.5 * se) << exponent_name(kind) << " q=" << q;
}

TEST(PathSimulation, ExponentialMomentPsi) { check_exponential_moment(ExponentKind::Psi, 0.5, 11); }
TEST(PathSimulation, ExponentialMomentPhiMinus) {
    check_exponential_moment(ExponentKind::PhiMinus, 0.7, 12);
}
TEST(PathSimulation, ExponentialMomentPhiPlus) {
    check_exponential_moment(ExponentKind::PhiPlus, -0.5, 13);
}

struct JumpSum {
    double total = 0.0;
    bool segment(double, double, double, double) { return true; }
    bool jump(const PathJump& j) {
        total += j.size;
        return true;
    }
};

// Integrating the Gaussian part out, E[e^{qξ(1)} | jumps] = e^{q(d + J) + q²v/2}.
// The jumps are negative, so this estimator has a light upper tail and its
// standard error is trustworthy even where e^{qξ(1)} itself is far too skewed.
MeanEstimate gaussian_integrated_moment(const PathModel& m, double q, std::uint64_t seed, int n) {
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng rng(seed, Stream::Auxiliary, static_cast<std::uint64_t>(i));
        JumpSum v;
        run_path(m, 1.0, 0.05, rng, v);
        values[static_cast<std::size_t>(i)] =
            std::exp(q * (m.drift() + v.total) + 0.5 * q * q * m.gaussian_variance());
    }
    return mean_estimate(values);
}

TEST(PathSimulation, ExponentialMomentAcrossTheRootInterval) {
    const PathModel m = PathModel::build(profile(), ExponentKind::Psi, cutoff());
    const double qs[] = {reference_omega_minus / 2, reference_omega_minus,
                         (reference_omega_minus + reference_omega_plus) / 2};
    for (double q : qs) {
        const MeanEstimate e = gaussian_integrated_moment(m, q, 14, 100000);
        const double target = std::exp(profile().psi(q));
        EXPECT_LE(e.z_score(target), 3.0) << "q=" << q << " mean " << e.mean << " target " << target
                                          << " se " << e.std_error;
    }
}

// Σ_{jumps before h} (e^{ξ(t-)} u)^w + small-fragment term + e^{w ξ(h)} has
// mean 1 at both roots because the simulated cumulant vanishes there. At the
// upper root the second moment grows too fast in h for a unit horizon.
void check_mass_power_balance(double w, double horizon, std::uint64_t seed) {
    const PathModel m = PathModel::build(profile(), ExponentKind::Psi, cutoff());
    const double small = m.small_fragment_moment(w);
    PathConfig config;
    config.horizon = horizon;
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        Rng rng(seed, Stream::Auxiliary, static_cast<std::uint64_t>(i));
        const SkeletonPath path = simulate_levy_path(m, config, rng);
        double total = std::exp(w * path.values.back()) + small * exponential_functional(path, w);
        for (double c : jump_weight_multiset(path, w)) total += c;
        sum += total;
        sum2 += total * total;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, 1.0, 4.5 * se) << "w=" << w;
    EXPECT_LT(se, 0.02);
}

TEST(PathSimulation, MassPowerBalanceAtOmegaMinus) { check_mass_power_balance(reference_omega_minus, 1.0, 21); }
TEST(PathSimulation, MassPowerBalanceAtOmegaPlus) { check_mass_power_balance(reference_omega_plus, 0.05, 22); }

TEST(FirstPassage, ProbabilityUnderPhiMinusIsExponential) {
    const PathModel m = PathModel::build(profile(), ExponentKind::PhiMinus, cutoff());
    PathConfig config;
    config.horizon = 400.0;
    const PassageRule rule = PassageRule::for_profile(profile());
    const double level = 0.5;
    const int n = 4000;
    int finite = 0, horizon = 0;
    for (int i = 0; i < n; ++i) {
        Rng rng(31, Stream::FirstPassage, static_cast<std::uint64_t>(i));
        const FirstPassage fp = first_passage_up(m, level, config, rule, rng);
        finite += fp.status == PassageStatus::Finite;
        horizon += fp.status == PassageStatus::HorizonReached;
    }
    const double p = std::exp(-level * profile().omega_delta());
    const double se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(static_cast<double>(finite) / n, p, 4.0 * se);
    EXPECT_EQ(horizon, 0);
}

TEST(FirstPassage, AlwaysFiniteUnderPhiPlus) {
    const PathModel m = PathModel::build(profile(), ExponentKind::PhiPlus, cutoff());
    PathConfig config;
    config.horizon = 400.0;
    const PassageRule rule = PassageRule::for_profile(profile());
    for (int i = 0; i < 200; ++i) {
        Rng rng(41, Stream::FirstPassage, static_cast<std::uint64_t>(i));
        const FirstPassage fp = first_passage_up(m, 1.0, config, rule, rng);
        ASSERT_EQ(fp.status, PassageStatus::Finite);
        EXPECT_GT(fp.time, 0.0);
    }
}

// Without upward jumps ξ(t(x)) = x, so Wald's identity gives E[t(x)] = x / Φ⁺'(0)
// and the passage time vanishes with the level.
TEST(FirstPassage, MeanTimeIsLevelOverDrift) {
    const PathModel m = PathModel::build(profile(), ExponentKind::PhiPlus, cutoff());
    const double h = 1e-5;
    const double slope = (m.exponent(h).value() - m.exponent(-h).value()) / (2 * h);
    PathConfig config;
    config.horizon = 400.0;
    const PassageRule rule = PassageRule::for_profile(profile());
    for (double level : {0.1, 0.01, 0.001}) {
        std::vector<double> times(2000);
        for (std::size_t i = 0; i < times.size(); ++i) {
            Rng rng(42, Stream::FirstPassage, i);
            times[i] = first_passage_up(m, level, config, rule, rng).time;
        }
        const MeanEstimate e = mean_estimate(times);
        EXPECT_LE(e.z_score(level / slope), 4.0) << "level " << level << " mean " << e.mean;
    }
}

double terminal_value(const PathModel& m, double horizon, Rng& rng) {
    EndValue v;
    run_path(m, horizon, 0.05, rng, v);
    return v.x;
}

// Φ⁻ has negative mean and drifts to -∞, Φ⁺ to +∞.
TEST(PathSimulation, TiltedLawsDriftApart) {
    const double horizon = 100.0;
    const int n = 500;
    for (ExponentKind kind : {ExponentKind::PhiMinus, ExponentKind::PhiPlus}) {
        const PathModel m = PathModel::build(profile(), kind, cutoff());
        const double h = 1e-5;
        const double slope = (m.exponent(h).value() - m.exponent(-h).value()) / (2 * h);
        std::vector<double> ends(n);
        int below = 0;
        for (int i = 0; i < n; ++i) {
            Rng rng(43, Stream::Auxiliary, static_cast<std::uint64_t>(i));
            ends[static_cast<std::size_t>(i)] = terminal_value(m, horizon, rng);
            below += ends[static_cast<std::size_t>(i)] < 0.0;
        }
        const MeanEstimate e = mean_estimate(ends);
        EXPECT_LE(e.z_score(slope * horizon), 4.0) << exponent_name(kind);
        if (kind == ExponentKind::PhiMinus) {
            EXPECT_LT(slope, 0.0);
            EXPECT_GE(below, n * 98 / 100);
        } else {
            EXPECT_GT(slope, 0.0);
            EXPECT_LE(below, n * 2 / 100);
        }
    }
}

std::vector<double> largest_weights(const PathConfig& config, std::uint64_t seed, int n) {
    const PathModel m = PathModel::build(profile(), ExponentKind::Psi, config.cutoff_u());
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Rng rng(seed, Stream::LevyPaths, static_cast<std::uint64_t>(i));
        const auto w = jump_weight_multiset(simulate_levy_path(m, config, rng), reference_omega_minus);
        out[static_cast<std::size_t>(i)] = w.empty() ? 0.0 : w.front();
    }
    return out;
}

TEST(Stability, LargestWeightUnderSmallerCutoff) {
    PathConfig coarse;
    PathConfig fine = coarse;
    fine.small_jump_cutoff = coarse.small_jump_cutoff / 4;
    const KsResult ks = ks_two_sample(largest_weights(coarse, 44, 4000), largest_weights(fine, 45, 4000));
    EXPECT_GE(ks.p_value, 0.01) << "D=" << ks.statistic;
}

TEST(Stability, LargestWeightUnderHalvedStep) {
    PathConfig coarse;
    PathConfig fine = coarse;
    fine.time_step = coarse.time_step / 2;
    const KsResult ks = ks_two_sample(largest_weights(coarse, 46, 4000), largest_weights(fine, 47, 4000));
    EXPECT_GE(ks.p_value, 0.01) << "D=" << ks.statistic;
}

// Knot index ending the Gaussian stretch in which the path first exceeds
// `level`, or 0 when it stays below up to the horizon.
std::size_t passage_knot(const SkeletonPath& path, double level, Rng& rng) {
    for (std::size_t k = 1; k < path.values.size(); ++k) {
        const double a = path.values[k - 1];
        const double b = path.value_before_knot(k);
        if (std::max(a, b) >= level) return k;
        const double h = path.grid_times[k] - path.grid_times[k - 1];
        if (rng.uniform() < bridge_crossing_probability(a, b, h, path.gaussian_variance, level)) return k;
    }
    return 0;
}

// Given a finite passage, the Φ⁻ path before it is a Φ⁺ path before its own
// passage, so the largest pre-passage weights agree in law.
TEST(JumpWeights, PrePassageLawMatchesPlusLaw) {
    const double level = 0.5;
    PathConfig config;
    config.horizon = 40.0;
    const auto collect = [&](ExponentKind kind, std::uint64_t seed, std::size_t wanted) {
        const PathModel m = PathModel::build(profile(), kind, cutoff());
        std::vector<double> out;
        for (std::uint64_t i = 0; out.size() < wanted; ++i) {
            Rng rng(seed, Stream::LevyPaths, i);
            const SkeletonPath path = simulate_levy_path(m, config, rng);
            const std::size_t k = passage_knot(path, level, rng);
            if (k == 0) continue;
            const auto w = jump_weight_multiset(path, reference_omega_minus, path.grid_times[k]);
            out.push_back(w.empty() ? 0.0 : w.front());
        }
        return out;
    };
    const KsResult ks = ks_two_sample(collect(ExponentKind::PhiMinus, 48, 2000), collect(ExponentKind::PhiPlus, 49, 2000));
    EXPECT_GE(ks.p_value, 0.01) << "D=" << ks.statistic;
}

TEST(JumpWeights, SortedAndStopped) {
    SkeletonPath path;
    path.jumps = {{0.1, std::log(0.5), 0.0, 0.5, JumpKind::Loss},
                  {0.4, std::log(0.75), std::log(0.5), 0.25, JumpKind::Loss},
                  {0.9, std::log(0.5), -1.0, 0.5, JumpKind::Loss}};
    const auto all = jump_weight_multiset(path, 2.0);
    ASSERT_EQ(all.size(), 3u);
    EXPECT_NEAR(all[0], 0.25, 1e-15);
    EXPECT_NEAR(all[1], std::exp(-2.0) * 0.25, 1e-15);
    EXPECT_NEAR(all[2], 0.125 * 0.125, 1e-15);
    EXPECT_EQ(jump_weight_multiset(path, 2.0, 0.5).size(), 2u);
}

TEST(Skeleton, KnotsAreConsistent) {
    const PathModel m = PathModel::build(profile(), ExponentKind::Psi, cutoff());
    Rng rng(51, Stream::LevyPaths, 0);
    PathConfig config;
    config.horizon = 3.0;
    const SkeletonPath path = simulate_levy_path(m, config, rng);
    ASSERT_EQ(path.values.size(), path.grid_times.size());
    EXPECT_DOUBLE_EQ(path.horizon(), 3.0);
    for (std::size_t k = 1; k < path.grid_times.size(); ++k) {
        EXPECT_GT(path.grid_times[k], path.grid_times[k - 1]);
        EXPECT_LE(path.grid_times[k] - path.grid_times[k - 1], config.time_step + 1e-12);
        if (path.jump_at[k] >= 0) {
            const PathJump& j = path.jumps[static_cast<std::size_t>(path.jump_at[k])];
            EXPECT_DOUBLE_EQ(path.values[k], j.level_before + j.size);
            EXPECT_LT(j.size, std::log1p(-m.cutoff_u()) + 1e-15);
        }
    }
    EXPECT_GT(path.jumps.size(), 30u);
}

}  // namespace
}  // namespace gfrag
