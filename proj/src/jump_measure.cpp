#include "gfrag/jump_measure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gfrag/quadrature.hpp"

namespace gfrag {

namespace {
constexpr double infinity = std::numeric_limits<double>::infinity();
}

double JumpMeasure::log_density_at(double log_u) const {
    return std::log(density_u(std::exp(log_u)));
}

double JumpMeasure::tail_u(double u) const {
    // Integrate in t = -log(v) so that the endpoint behaviour at v -> 0 is harmless.
    if (u >= 1.0) return 0.0;
    const double t_max = -std::log(u);
    auto integrand = [this](double t) { return std::exp(log_density_at(-t) - t); };
    return integrate(integrand, 0.0, t_max, {1e-12, 1e-300, 4000}).value;
}

double JumpMeasure::partial_moment(double q, double lo, double hi) const {
    if (hi <= lo) return 0.0;
    if (lo <= 0.0 && q <= moment_threshold()) return infinity;
    auto integrand = [this, q](double t) { return std::exp(log_density_at(-t) - (q + 1.0) * t); };
    const double t_lo = -std::log(hi);
    if (lo <= 0.0) return integrate_to_infinity(integrand, t_lo, {1e-12, 1e-300, 4000}).value;
    return integrate(integrand, t_lo, -std::log(lo), {1e-12, 1e-300, 4000}).value;
}

double JumpMeasure::density(double y) const {
    if (!(y < 0.0)) return 0.0;
    const double u = -std::expm1(y);
    return density_u(u) * (1.0 - u);
}

double JumpMeasure::tail(double y) const {
    if (!(y < 0.0)) return infinity;
    return tail_u(-std::expm1(y));
}

PowerJumpMeasure::PowerJumpMeasure(double theta, double rho, bool use_closed_form)
    : theta_(theta), rho_(rho), use_closed_form_(use_closed_form) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw std::invalid_argument("power jump measure: theta must be positive and finite");
    }
    if (!std::isfinite(rho) || rho >= 1.0) {
        throw std::invalid_argument("power jump measure: rho must be below 1");
    }
    if (std::abs(rho + 1.0) < 1e-12) {
        throw std::invalid_argument("power jump measure: rho = -1 is not supported");
    }
}

double PowerJumpMeasure::density_u(double u) const {
    if (!(u > 0.0) || u >= 1.0) return 0.0;
    return theta_ * std::pow(u, -2.0 - rho_);
}

double PowerJumpMeasure::log_density_at(double log_u) const {
    return std::log(theta_) - (2.0 + rho_) * log_u;
}

double PowerJumpMeasure::tail_u(double u) const {
    if (u >= 1.0) return 0.0;
    if (u <= 0.0) return rho_ > -1.0 ? infinity : theta_ / (-1.0 - rho_);
    return theta_ * (std::pow(u, -1.0 - rho_) - 1.0) / (1.0 + rho_);
}

double PowerJumpMeasure::partial_moment(double q, double lo, double hi) const {
    if (hi <= lo) return 0.0;
    const double k = q - 1.0 - rho_;
    if (lo <= 0.0 && k <= 0.0) return infinity;
    if (std::abs(k) < 1e-12) return theta_ * std::log(hi / lo);
    const double lo_term = lo <= 0.0 ? 0.0 : std::pow(lo, k);
    return theta_ * (std::pow(hi, k) - lo_term) / k;
}

std::optional<double> PowerJumpMeasure::closed_form_moment(double q) const {
    if (!use_closed_form_) return std::nullopt;
    const double k = q - 1.0 - rho_;
    if (k <= 0.0) return infinity;
    return theta_ / k;
}

double PowerJumpMeasure::sample_above(double u_cut, Rng& rng) const {
    // Invert ν((u, 1)) = θ (u^{-1-ρ} - 1) / (1 + ρ) restricted to (u_cut, 1).
    const double a = -1.0 - rho_;
    const double top = std::pow(u_cut, a);
    const double v = rng.uniform();
    return std::pow(top + v * (1.0 - top), 1.0 / a);
}

double PowerJumpMeasure::sample_moment_weighted(double q, Rng& rng) const {
    const double k = q - 1.0 - rho_;
    if (!(k > 0.0)) {
        throw std::invalid_argument("moment-weighted jump law is not normalisable at this q");
    }
    return std::pow(rng.uniform(), 1.0 / k);
}

double NullJumpMeasure::sample_above(double, Rng&) const {
    throw std::logic_error("null jump measure has no jumps to sample");
}

double NullJumpMeasure::sample_moment_weighted(double, Rng&) const {
    throw std::logic_error("null jump measure has no jumps to sample");
}

}  // namespace gfrag
