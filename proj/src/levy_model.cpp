#include "gfrag/levy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gfrag/quadrature.hpp"

namespace gfrag {

namespace {

constexpr QuadratureOptions exponent_quadrature{1e-13, 1e-300, 6000};

// (1-u)^q - 1 + qu without cancellation for small u.
double compensated_power(double u, double q) {
    if (u < 0.05) {
        // Binomial series: sum_{k>=2} C(q,k) (-u)^k.
        double term = q * (q - 1.0) * 0.5 * u * u;
        double sum = term;
        for (int k = 3; k < 200; ++k) {
            term *= -(q - k + 1.0) / k * u;
            sum += term;
            if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return std::expm1(q * std::log1p(-u)) + q * u;
}

}  // namespace

void LevyTriplet::check() const {
    if (!std::isfinite(sigma2) || sigma2 < 0.0) {
        throw std::invalid_argument("triplet: sigma2 must be finite and nonnegative");
    }
    if (!std::isfinite(drift)) throw std::invalid_argument("triplet: drift must be finite");
    if (!std::isfinite(alpha)) throw std::invalid_argument("triplet: alpha must be finite");
    if (!jumps) throw std::invalid_argument("triplet: missing jump measure");
}

double compensated_jump_integral(const JumpMeasure& jumps, double q) {
    if (jumps.is_null() || q == 0.0) return 0.0;
    auto integrand = [&jumps, q](double t) {
        const double log_weight = jumps.log_density_at(-t) - t;
        if (t > 40.0) {
            // Leading binomial term; u^2 would underflow long before the weight does.
            return 0.5 * q * (q - 1.0) * std::exp(log_weight - 2.0 * t);
        }
        return compensated_power(std::exp(-t), q) * std::exp(log_weight);
    };
    return integrate_to_infinity(integrand, 0.0, exponent_quadrature).value;
}

double laplace_exponent(const LevyTriplet& triplet, double q) {
    if (q < 0.0 || !std::isfinite(q)) {
        throw std::invalid_argument("laplace_exponent: q must be finite and nonnegative");
    }
    if (q == 0.0) return 0.0;
    return 0.5 * triplet.sigma2 * q * q + triplet.drift * q +
           compensated_jump_integral(*triplet.jumps, q);
}

ExtendedReal cumulant(const LevyTriplet& triplet, double q) {
    const JumpMeasure& jumps = *triplet.jumps;
    double moment = 0.0;
    if (!jumps.is_null()) {
        if (auto closed = jumps.closed_form_moment(q)) {
            moment = *closed;
        } else if (q <= jumps.moment_threshold()) {
            moment = std::numeric_limits<double>::infinity();
        } else {
            moment = jumps.partial_moment(q, 0.0, 1.0);
        }
    }
    if (!std::isfinite(moment)) return ExtendedReal::infinity();
    return laplace_exponent(triplet, q) + moment;
}

CumulantProfile::CumulantProfile(LevyTriplet triplet, double omega_minus, double omega_plus,
                                 double finite_beyond)
    : triplet_(std::move(triplet)),
      omega_minus_(omega_minus),
      omega_plus_(omega_plus),
      omega_delta_(omega_plus - omega_minus),
      finite_beyond_(finite_beyond) {
    if (!(omega_minus > 0.0 && omega_plus > omega_minus)) {
        throw std::invalid_argument("cumulant profile: need 0 < omega_minus < omega_plus");
    }
}

namespace {

// Bisection on a sign change of κ, treating +inf as positive. `negative_side`
// is a point with κ < 0, `positive_side` one with κ > 0 (or +inf).
double bisect_root(const LevyTriplet& triplet, double negative_side, double positive_side) {
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (negative_side + positive_side);
        if (mid == negative_side || mid == positive_side) break;
        if (std::abs(positive_side - negative_side) <= 1e-15 * std::max(1.0, std::abs(mid))) break;
        const ExtendedReal value = cumulant(triplet, mid);
        if (value.is_finite() && value.value() < 0.0) {
            negative_side = mid;
        } else {
            positive_side = mid;
        }
    }
    // Return whichever endpoint has the smaller residual.
    const ExtendedReal at_positive = cumulant(triplet, positive_side);
    const double negative_residual = std::abs(cumulant(triplet, negative_side).value());
    if (at_positive.is_finite() && std::abs(at_positive.value()) < negative_residual) {
        return positive_side;
    }
    return negative_side;
}

// Golden-section minimisation of a convex function on [lo, hi].
double golden_minimum(const LevyTriplet& triplet, double lo, double hi, double* min_value) {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    auto value = [&](double q) { return cumulant(triplet, q).value_or(1e300); };
    double a = lo;
    double b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = value(c);
    double fd = value(d);
    for (int iter = 0; iter < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(c)); ++iter) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = value(d);
        }
    }
    const double best = fc < fd ? c : d;
    *min_value = std::min(fc, fd);
    return best;
}

}  // namespace

CumulantProfile find_cramer_roots(const LevyTriplet& triplet, const RootSearchOptions& options) {
    triplet.check();
    if (!(options.bracket_max > options.bracket_min) || options.bracket_min <= 0.0 ||
        options.scan_points < 3) {
        throw std::invalid_argument("find_cramer_roots: invalid scan bracket");
    }
    const int n = options.scan_points;
    std::vector<double> grid(n);
    std::vector<double> values(n);
    const double log_ratio = std::log(options.bracket_max / options.bracket_min);
    int finite_count = 0;
    int best = -1;
    for (int i = 0; i < n; ++i) {
        grid[i] = options.bracket_min * std::exp(log_ratio * (i + 1) / n);
        const ExtendedReal k = cumulant(triplet, grid[i]);
        values[i] = k.value_or(std::numeric_limits<double>::infinity());
        if (k.is_finite()) {
            ++finite_count;
            if (best < 0 || values[i] < values[best]) best = i;
        }
    }
    if (finite_count == 0) {
        throw CramerRootError(CramerRootError::Kind::FiniteDomainExceeded,
                              "Cramér condition: kappa is +inf on the whole scan bracket");
    }
    double min_value = values[best];
    double min_point = grid[best];
    if (min_value >= 0.0) {
        const double lo = best > 0 ? grid[best - 1] : options.bracket_min;
        const double hi = best + 1 < n ? grid[best + 1] : options.bracket_max;
        min_point = golden_minimum(triplet, lo, hi, &min_value);
        if (min_value > options.tangency_tolerance) {
            std::ostringstream msg;
            msg << "Cramér condition: kappa stays positive (minimum " << min_value << " at q="
                << min_point << ")";
            throw CramerRootError(CramerRootError::Kind::NoRoots, msg.str());
        }
    }
    if (min_value >= -options.tangency_tolerance) {
        std::ostringstream msg;
        msg << "Cramér condition: kappa touches zero tangentially at q=" << min_point;
        throw CramerRootError(CramerRootError::Kind::OneRoot, msg.str());
    }

    // Nearest nonnegative (or +inf) scan points on either side of the minimum.
    int left = -1;
    int right = n;
    for (int i = 0; i < n; ++i) {
        if (values[i] < 0.0) continue;
        if (grid[i] < min_point) left = i;
        if (grid[i] > min_point && right == n) right = i;
    }
    const double left_positive = left >= 0 ? grid[left] : options.bracket_min;
    if (left < 0 && cumulant(triplet, left_positive).value_or(1.0) < 0.0) {
        throw CramerRootError(CramerRootError::Kind::OneRoot,
                              "Cramér condition: kappa is negative down to the bracket minimum");
    }
    if (right >= n) {
        throw CramerRootError(CramerRootError::Kind::OneRoot,
                              "Cramér condition: kappa stays negative up to bracket_max");
    }
    const double omega_minus = bisect_root(triplet, min_point, left_positive);
    const double omega_plus = bisect_root(triplet, min_point, grid[right]);

    // Largest stored ε (from a short list) with κ(ω₊ + ε) finite.
    double finite_beyond = 0.0;
    for (double eps : {1.0, 0.5, 0.1, 0.01}) {
        if (cumulant(triplet, omega_plus + eps).is_finite()) {
            finite_beyond = eps;
            break;
        }
    }
    if (finite_beyond == 0.0) {
        throw CramerRootError(CramerRootError::Kind::FiniteDomainExceeded,
                              "Cramér condition: kappa is not finite beyond omega_plus");
    }
    return CumulantProfile(triplet, omega_minus, omega_plus, finite_beyond);
}

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const AssumptionCheck& c) { return c.passed; });
}

const AssumptionCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

ValidationReport validate_assumptions(const LevyTriplet& triplet, const RootSearchOptions& options) {
    ValidationReport report;
    const JumpMeasure& jumps = *triplet.jumps;

    {
        // Tail of ν near u = 0 must grow without bound.
        std::ostringstream detail;
        bool increasing = true;
        double previous = 0.0;
        for (double u : {1e-3, 1e-6, 1e-9, 1e-12}) {
            const double t = jumps.tail_u(u);
            detail << "tail(u=" << u << ")=" << t << " ";
            if (!(t > previous * 1.5)) increasing = false;
            previous = t;
        }
        report.checks.push_back({"infinite_mass", increasing && previous > 1e6, detail.str()});
    }
    {
        std::ostringstream detail;
        bool ok = false;
        if (jumps.is_null()) {
            detail << "no jumps";
            ok = true;
        } else {
            try {
                auto integrand = [&jumps](double t) {
                    const double log_weight = jumps.log_density_at(-t) - t;
                    if (t > 40.0) return std::exp(log_weight - 2.0 * t);
                    const double y = std::log1p(-std::exp(-t));
                    return std::min(1.0, y * y) * std::exp(log_weight);
                };
                const double value =
                    integrate_to_infinity(integrand, 0.0, {1e-9, 1e-300, 4000}).value;
                ok = std::isfinite(value);
                detail << "integral of min(1,y^2) = " << value;
            } catch (const QuadratureError& e) {
                detail << e.what();
            }
        }
        report.checks.push_back({"finite_truncated_second_moment", ok, detail.str()});
    }

    bool have_roots = false;
    double omega_minus = 0.0;
    double omega_plus = 0.0;
    double finite_beyond = 0.0;
    try {
        const CumulantProfile profile = find_cramer_roots(triplet, options);
        have_roots = true;
        omega_minus = profile.omega_minus();
        omega_plus = profile.omega_plus();
        finite_beyond = profile.kappa_finite_beyond();
        std::ostringstream detail;
        detail.precision(12);
        detail << "omega_minus=" << omega_minus << " omega_plus=" << omega_plus;
        report.checks.push_back({"cramer_roots", true, detail.str()});
    } catch (const CramerRootError& e) {
        report.checks.push_back({"cramer_roots", false, e.what()});
    }

    if (have_roots) {
        std::ostringstream detail;
        detail << "kappa(omega_plus + " << finite_beyond
               << ") = " << cumulant(triplet, omega_plus + finite_beyond).value_or(INFINITY);
        report.checks.push_back({"kappa_finite_beyond_omega_plus", true, detail.str()});

        // Heuristic: one-sided difference quotients at two step sizes agree.
        const double k0 = cumulant(triplet, omega_minus).value();
        const double h1 = 1e-4;
        const double h2 = 1e-5;
        const double slope1 = (cumulant(triplet, omega_minus + h1).value() - k0) / h1;
        const double slope2 = (cumulant(triplet, omega_minus + h2).value() - k0) / h2;
        const bool stable = std::isfinite(slope1) && std::isfinite(slope2) &&
                            std::abs(slope1 - slope2) <= 0.05 * std::abs(slope2) + 1e-6;
        std::ostringstream slope_detail;
        slope_detail << "heuristic finite-difference slopes " << slope1 << " (h=1e-4), " << slope2
                     << " (h=1e-5)";
        report.checks.push_back({"kappa_slope_finite_at_omega_minus", stable, slope_detail.str()});
    } else {
        report.checks.push_back(
            {"kappa_finite_beyond_omega_plus", false, "no Cramér roots to test against"});
        report.checks.push_back(
            {"kappa_slope_finite_at_omega_minus", false, "no Cramér roots to test against"});
    }

    {
        std::ostringstream detail;
        if (triplet.alpha < 0.0) {
            detail << "alpha=" << triplet.alpha
                   << " < 0: finite lifetimes, canonical-measure tail available";
        } else if (triplet.alpha > 0.0) {
            detail << "alpha=" << triplet.alpha << " > 0: cells live forever";
        } else {
            detail << "alpha=0: homogeneous (branching Lévy) case";
        }
        report.checks.push_back({"alpha_sign", true, detail.str()});
    }
    {
        // Λ̄(y) -> inf as y -> 0-, probed along y = -10^-k.
        std::ostringstream detail;
        double previous = 0.0;
        bool diverging = true;
        for (int k = 2; k <= 12; k += 2) {
            const double y = -std::pow(10.0, -k);
            const double t = jumps.tail(y);
            if (!(t > previous) || !std::isfinite(t)) diverging = false;
            previous = t;
        }
        detail << "tail(-1e-12) = " << previous;
        report.checks.push_back({"tail_diverges_at_zero", diverging && previous > 1e6, detail.str()});
    }
    return report;
}

}  // namespace gfrag
