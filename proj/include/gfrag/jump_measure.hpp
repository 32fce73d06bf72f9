#pragma once

#include <memory>
#include <optional>
#include <string>

#include "gfrag/rng.hpp"

namespace gfrag {

// Lévy measure Λ of a spectrally negative process, carried on (-inf, 0).
// Internally everything is expressed in the relative mass loss u = 1 - e^y,
// which maps (-inf, 0) onto (0, 1); ν(du) denotes the image of Λ.
class JumpMeasure {
public:
    virtual ~JumpMeasure() = default;

    virtual std::string family() const = 0;

    // ν density at u in (0, 1).
    virtual double density_u(double u) const = 0;

    // log ν density as a function of log(u); lets quadrature run deep into
    // u -> 0 without overflow.
    virtual double log_density_at(double log_u) const;

    // ν((u, 1)) = Λ((-inf, log(1 - u))). Default integrates the density.
    virtual double tail_u(double u) const;

    // ∫_lo^hi u^q ν(du); +inf when the integral diverges. Default uses quadrature.
    virtual double partial_moment(double q, double lo, double hi) const;

    // ∫_0^1 u^q ν(du) from a closed form, if the family supplies one and the
    // closed form has not been switched off. +inf when divergent.
    virtual std::optional<double> closed_form_moment(double) const { return std::nullopt; }

    // Infimum of the exponents q with ∫_0^1 u^q ν(du) < inf.
    virtual double moment_threshold() const = 0;

    // Draw from ν restricted to (u_cut, 1), normalised.
    virtual double sample_above(double u_cut, Rng& rng) const = 0;

    // Draw from u^q ν(du) on (0, 1), normalised. Requires q > moment_threshold().
    virtual double sample_moment_weighted(double q, Rng& rng) const = 0;

    virtual bool is_null() const { return false; }

    // y-coordinate views: Λ(dy) = λ(y) dy and Λ((-inf, y)).
    double density(double y) const;
    double tail(double y) const;
};

// ν(du) = θ u^{-2-ρ} du on (0, 1). Infinite mass for ρ > -1; ρ < -1 gives a
// finite measure (useful for exercising the assumption checks).
class PowerJumpMeasure final : public JumpMeasure {
public:
    PowerJumpMeasure(double theta, double rho, bool use_closed_form = true);

    std::string family() const override { return "power"; }
    double density_u(double u) const override;
    double log_density_at(double log_u) const override;
    double tail_u(double u) const override;
    double partial_moment(double q, double lo, double hi) const override;
    std::optional<double> closed_form_moment(double q) const override;
    double moment_threshold() const override { return 1.0 + rho_; }
    double sample_above(double u_cut, Rng& rng) const override;
    double sample_moment_weighted(double q, Rng& rng) const override;

    double theta() const noexcept { return theta_; }
    double rho() const noexcept { return rho_; }
    bool uses_closed_form() const noexcept { return use_closed_form_; }

private:
    double theta_;
    double rho_;
    bool use_closed_form_;
};

// Λ = 0; turns the process into Brownian motion with drift.
class NullJumpMeasure final : public JumpMeasure {
public:
    std::string family() const override { return "none"; }
    double density_u(double) const override { return 0.0; }
    double log_density_at(double) const override { return -INFINITY; }
    double tail_u(double) const override { return 0.0; }
    double partial_moment(double, double, double) const override { return 0.0; }
    std::optional<double> closed_form_moment(double) const override { return 0.0; }
    double moment_threshold() const override { return -1e300; }
    double sample_above(double, Rng&) const override;
    double sample_moment_weighted(double, Rng&) const override;
    bool is_null() const override { return true; }
};

using JumpMeasurePtr = std::shared_ptr<const JumpMeasure>;

}  // namespace gfrag
