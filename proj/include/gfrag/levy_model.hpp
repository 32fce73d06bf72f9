#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gfrag/jump_measure.hpp"

namespace gfrag {

// Real number or +inf, where +inf marks a divergent integral rather than an
// arithmetic overflow.
class ExtendedReal {
public:
    constexpr ExtendedReal(double value) noexcept : value_(value), infinite_(false) {}
    static constexpr ExtendedReal infinity() noexcept { return ExtendedReal(); }

    constexpr bool is_infinite() const noexcept { return infinite_; }
    constexpr bool is_finite() const noexcept { return !infinite_; }
    double value() const {
        if (infinite_) throw std::domain_error("extended real is +inf");
        return value_;
    }
    // Finite value, or `fallback` for +inf.
    constexpr double value_or(double fallback) const noexcept {
        return infinite_ ? fallback : value_;
    }

private:
    constexpr ExtendedReal() noexcept : value_(0.0), infinite_(true) {}
    double value_;
    bool infinite_;
};

struct LevyTriplet {
    double sigma2 = 0.0;
    double drift = 0.0;
    double alpha = 0.0;
    JumpMeasurePtr jumps = std::make_shared<NullJumpMeasure>();

    // Throws std::invalid_argument when sigma2 < 0 or a parameter is not finite.
    void check() const;
};

// Ψ(q) = σ²q²/2 + dq + ∫(e^{qy} - 1 + q(1 - e^y)) Λ(dy), q >= 0.
double laplace_exponent(const LevyTriplet& triplet, double q);

// κ(q) = Ψ(q) + ∫(1 - e^y)^q Λ(dy); +inf when the second integral diverges.
ExtendedReal cumulant(const LevyTriplet& triplet, double q);

// Jump part of Ψ alone: ∫_0^1 ((1-u)^q - 1 + qu) ν(du).
double compensated_jump_integral(const JumpMeasure& jumps, double q);

class CramerRootError : public std::runtime_error {
public:
    enum class Kind { NoRoots, OneRoot, FiniteDomainExceeded };
    CramerRootError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// Ψ, κ and the two Cramér roots ω₋ < ω₊ of κ, plus the shifted exponents
// Φ±(q) = κ(q + ω±). Immutable once built.
class CumulantProfile {
public:
    CumulantProfile(LevyTriplet triplet, double omega_minus, double omega_plus,
                    double finite_beyond);

    const LevyTriplet& triplet() const noexcept { return triplet_; }
    double omega_minus() const noexcept { return omega_minus_; }
    double omega_plus() const noexcept { return omega_plus_; }
    double omega_delta() const noexcept { return omega_delta_; }
    // ε with κ(ω₊ + ε) < inf.
    double kappa_finite_beyond() const noexcept { return finite_beyond_; }

    double psi(double q) const { return laplace_exponent(triplet_, q); }
    ExtendedReal kappa(double q) const { return cumulant(triplet_, q); }
    ExtendedReal phi_minus(double q) const { return kappa(q + omega_minus_); }
    ExtendedReal phi_plus(double q) const { return kappa(q + omega_plus_); }

private:
    LevyTriplet triplet_;
    double omega_minus_;
    double omega_plus_;
    double omega_delta_;
    double finite_beyond_;
};

struct RootSearchOptions {
    double bracket_max = 64.0;
    double bracket_min = 1e-3;
    int scan_points = 512;
    // |min κ| below this counts as tangency.
    double tangency_tolerance = 1e-10;
};

CumulantProfile find_cramer_roots(const LevyTriplet& triplet, const RootSearchOptions& options = {});

struct AssumptionCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;
    bool all_passed() const;
    const AssumptionCheck* find(const std::string& name) const;
};

ValidationReport validate_assumptions(const LevyTriplet& triplet,
                                      const RootSearchOptions& options = {});

}  // namespace gfrag
