#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "gfrag/levy_model.hpp"
#include "reference_model.hpp"

namespace gfrag {
namespace {

using testing::reference_omega_minus;
using testing::reference_omega_plus;
using testing::reference_triplet;

// Independent oracle for the jump part of Ψ: Boost's Gauss-Kronrod on the
// u = v² substituted integral, evaluated in long double.
double jump_integral_oracle(double q, double theta, double rho) {
    auto f = [=](long double v) -> long double {
        if (v <= 0) return 0;
        const long double u = v * v;
        const long double bracket = std::expm1(q * std::log1p(-u)) + q * u;
        return 2 * theta * bracket * std::pow(v, -3.0L - 2 * rho);
    };
    return static_cast<double>(
        boost::math::quadrature::gauss_kronrod<long double, 61>::integrate(f, 0.0L, 1.0L, 15,
                                                                          1e-13L));
}

// Beta-function closed form of the same integral.
double jump_integral_closed_form(double q, double theta, double rho) {
    using boost::math::tgamma;
    const double ratio = q - rho == 0.0 ? 0.0 : tgamma(-1 - rho) * tgamma(q + 1) / tgamma(q - rho);
    return theta * (ratio + 1 / (1 + rho) - q / rho);
}

TEST(LaplaceExponent, VanishesAtZero) {
    EXPECT_EQ(laplace_exponent(reference_triplet(), 0.0), 0.0);
}

TEST(LaplaceExponent, BrownianReduction) {
    LevyTriplet t;
    t.sigma2 = 2.0;
    t.drift = 1.0;
    EXPECT_DOUBLE_EQ(laplace_exponent(t, 1.0), 2.0);
}

TEST(LaplaceExponent, ReferenceModelAtTwoMatchesOracles) {
    // Frozen from a 60-digit evaluation of the closed form: Ψ(2) = -5 exactly.
    const double value = laplace_exponent(reference_triplet(), 2.0);
    EXPECT_NEAR(value, -5.0, 1e-9);
    const double oracle = 4.0 - 10.0 + jump_integral_oracle(2.0, 0.5, 0.5);
    EXPECT_NEAR(value, oracle, 1e-9);
}

TEST(LaplaceExponent, MatchesOraclesOnGrid) {
    const LevyTriplet t = reference_triplet();
    for (double q : {0.3, 0.5, 1.0, 1.6, 2.7, 3.79, 5.0, 8.0}) {
        const double jump = compensated_jump_integral(*t.jumps, q);
        EXPECT_NEAR(jump, jump_integral_closed_form(q, 0.5, 0.5), 1e-9 * (1 + std::abs(jump)))
            << "q=" << q;
        EXPECT_NEAR(jump, jump_integral_oracle(q, 0.5, 0.5), 1e-9 * (1 + std::abs(jump)))
            << "q=" << q;
    }
    // 60-digit reference value.
    EXPECT_NEAR(laplace_exponent(t, 2.7), -4.1038215628985549865, 1e-10);
}

TEST(Cumulant, InfiniteBelowIntegrabilityThreshold) {
    const LevyTriplet t = reference_triplet();
    EXPECT_TRUE(cumulant(t, 1.5).is_infinite());
    EXPECT_TRUE(cumulant(t, 1.0).is_infinite());
    EXPECT_TRUE(cumulant(reference_triplet(false), 1.2).is_infinite());
    EXPECT_TRUE(cumulant(t, 1.5000001).is_finite());
}

TEST(Cumulant, ReferenceModelAtThree) {
    // Ψ-oracle plus θ/(q-1-ρ); equals -3 exactly for the reference model.
    const double oracle = 0.5 * 2 * 9 - 15 + jump_integral_oracle(3.0, 0.5, 0.5) + 0.5 / 1.5;
    EXPECT_NEAR(cumulant(reference_triplet(), 3.0).value(), oracle, 1e-9);
    EXPECT_NEAR(cumulant(reference_triplet(), 3.0).value(), -3.0, 1e-9);
    // Quadrature route for the jump moment agrees with the closed form.
    EXPECT_NEAR(cumulant(reference_triplet(false), 3.0).value(), -3.0, 1e-9);
}

TEST(CramerRoots, MatchHighPrecisionBisection) {
    const CumulantProfile p = find_cramer_roots(reference_triplet());
    EXPECT_NEAR(p.omega_minus(), reference_omega_minus, 1e-10);
    EXPECT_NEAR(p.omega_plus(), reference_omega_plus, 1e-10);
    EXPECT_EQ(p.omega_delta(), p.omega_plus() - p.omega_minus());
    EXPECT_LE(std::abs(p.kappa(p.omega_minus()).value()), 1e-10);
    EXPECT_LE(std::abs(p.kappa(p.omega_plus()).value()), 1e-10);
    EXPECT_LE(std::abs(p.phi_minus(p.omega_delta()).value()), 1e-10);
    EXPECT_TRUE(p.kappa(p.omega_plus() + p.kappa_finite_beyond()).is_finite());
    const double ratio = p.omega_plus() / p.omega_minus();
    EXPECT_GT(ratio, 1.5);
    EXPECT_LT(ratio, 2.5);
}

TEST(CramerRoots, QuadratureRouteAgrees) {
    const CumulantProfile p = find_cramer_roots(reference_triplet(false));
    EXPECT_NEAR(p.omega_minus(), reference_omega_minus, 1e-9);
    EXPECT_NEAR(p.omega_plus(), reference_omega_plus, 1e-9);
}

TEST(CramerRoots, ShiftedExponentsAreConsistent) {
    const CumulantProfile p = find_cramer_roots(reference_triplet());
    for (int i = 0; i < 50; ++i) {
        const double q = 0.05 * i;
        const auto plus = p.phi_plus(q);
        const auto shifted = p.phi_minus(p.omega_delta() + q);
        ASSERT_TRUE(plus.is_finite());
        EXPECT_NEAR(plus.value(), shifted.value(), 1e-10) << "q=" << q;
    }
}

TEST(CramerRoots, NoRootsWhenKappaPositive) {
    LevyTriplet t = reference_triplet();
    t.drift = 5.0;
    try {
        find_cramer_roots(t);
        FAIL() << "expected NoRoots";
    } catch (const CramerRootError& e) {
        EXPECT_EQ(e.kind(), CramerRootError::Kind::NoRoots);
    }
}

TEST(CramerRoots, FiniteDomainExceeded) {
    LevyTriplet t = reference_triplet();
    RootSearchOptions options;
    options.bracket_max = 1.4;
    try {
        find_cramer_roots(t, options);
        FAIL() << "expected FiniteDomainExceeded";
    } catch (const CramerRootError& e) {
        EXPECT_EQ(e.kind(), CramerRootError::Kind::FiniteDomainExceeded);
    }
}

TEST(CramerRoots, TangencyIsOneRoot) {
    // min_q κ(q) is increasing in the drift; bisect the drift until the
    // minimum sits at zero to within the tangency tolerance.
    LevyTriplet t = reference_triplet();
    auto min_kappa = [&t] {
        double lo = 1.51;
        double hi = 4.0;
        for (int i = 0; i < 200; ++i) {
            const double a = lo + (hi - lo) / 3;
            const double b = hi - (hi - lo) / 3;
            if (cumulant(t, a).value() < cumulant(t, b).value()) hi = b; else lo = a;
        }
        return cumulant(t, 0.5 * (lo + hi)).value();
    };
    double d_lo = -5.0;  // min κ < 0
    double d_hi = 0.0;   // min κ > 0
    for (int i = 0; i < 80; ++i) {
        t.drift = 0.5 * (d_lo + d_hi);
        const double m = min_kappa();
        if (std::abs(m) < 1e-12) break;
        (m < 0 ? d_lo : d_hi) = t.drift;
    }
    try {
        find_cramer_roots(t);
        FAIL() << "expected OneRoot";
    } catch (const CramerRootError& e) {
        EXPECT_EQ(e.kind(), CramerRootError::Kind::OneRoot) << e.what();
    }
}

TEST(Profile, ConvexityAndOrdering) {
    const CumulantProfile p = find_cramer_roots(reference_triplet());
    const int n = 200;
    const double lo = 1.55;
    const double hi = 7.0;
    const double h = (hi - lo) / (n - 1);
    for (int i = 1; i + 1 < n; ++i) {
        const double q = lo + i * h;
        const double second = p.kappa(q - h).value() - 2 * p.kappa(q).value() + p.kappa(q + h).value();
        EXPECT_GE(second, -1e-8) << "q=" << q;
        const double psi_second = p.psi(q - h) - 2 * p.psi(q) + p.psi(q + h);
        EXPECT_GE(psi_second, -1e-8);
        EXPECT_LT(p.psi(q), p.kappa(q).value());
    }
    for (int i = 0; i <= 40; ++i) {
        const double q = p.omega_minus() + i * p.omega_delta() / 40;
        EXPECT_LT(p.psi(q), 0.0);
    }
}

TEST(JumpMeasure, TailMatchesIntegratedDensity) {
    const PowerJumpMeasure m(0.5, 0.5);
    for (double y : {-3.0, -1.0, -0.1, -1e-3, -1e-6}) {
        const double analytic = m.tail(y);
        const double quadrature = m.JumpMeasure::tail_u(-std::expm1(y));
        EXPECT_NEAR(quadrature, analytic, 1e-8 * analytic) << "y=" << y;
    }
    // tail is nonincreasing in y and density nonnegative.
    double previous = 0.0;
    for (double y = -5.0; y < -1e-4; y *= 0.8) {
        EXPECT_GE(m.density(y), 0.0);
        EXPECT_GE(m.tail(y), previous);
        previous = m.tail(y);
    }
}

TEST(JumpMeasure, PartialMomentsMatchQuadrature) {
    const PowerJumpMeasure m(0.5, 0.5);
    for (double q : {1.6, 2.0, 3.79}) {
        EXPECT_NEAR(m.partial_moment(q, 0.0, 0.05), m.JumpMeasure::partial_moment(q, 0.0, 0.05),
                    1e-9);
        EXPECT_NEAR(m.partial_moment(q, 0.05, 1.0), m.JumpMeasure::partial_moment(q, 0.05, 1.0),
                    1e-9);
    }
}

TEST(Validation, ReferenceModelPassesEverything) {
    const ValidationReport report = validate_assumptions(reference_triplet());
    for (const auto& c : report.checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
    EXPECT_TRUE(report.all_passed());
}

TEST(Validation, FiniteMassIsFlagged) {
    LevyTriplet t = reference_triplet();
    t.jumps = std::make_shared<PowerJumpMeasure>(0.5, -1.5);
    const ValidationReport report = validate_assumptions(t);
    EXPECT_FALSE(report.find("infinite_mass")->passed);
    EXPECT_FALSE(report.find("tail_diverges_at_zero")->passed);
}

TEST(Validation, MissingRootsAreFlagged) {
    LevyTriplet t = reference_triplet();
    t.drift = 5.0;
    const ValidationReport report = validate_assumptions(t);
    EXPECT_FALSE(report.find("cramer_roots")->passed);
    EXPECT_FALSE(report.all_passed());
}

}  // namespace
}  // namespace gfrag
