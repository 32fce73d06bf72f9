#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace gfrag {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

struct QuadratureOptions {
    double relative_tolerance = 1e-11;
    double absolute_tolerance = 1e-14;
    int max_intervals = 4000;
};

// Globally adaptive 15-point Gauss-Kronrod on a finite interval.
// Throws QuadratureError (carrying the worst unresolved subinterval) when the
// interval budget runs out before the tolerance is met.
QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureOptions& options = {});

// Integral over [lo, +inf) via t = lo + s / (1 - s) on s in [0, 1).
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double lo,
                                       const QuadratureOptions& options = {});

}  // namespace gfrag
