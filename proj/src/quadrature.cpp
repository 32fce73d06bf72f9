#include "gfrag/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

namespace gfrag {
namespace {

constexpr std::array<double, 8> kronrod_nodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (7-point Gauss rule).
constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

Segment evaluate(const std::function<double(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = kronrod_weights[7] * fc;
    double gauss = gauss_weights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kronrod_nodes[i];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[i] * pair;
        if (i % 2 == 1) gauss += gauss_weights[i / 2] * pair;
    }
    const double value = kronrod * half;
    const double error = std::abs((kronrod - gauss) * half);
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << "non-finite integrand on [" << lo << ", " << hi << "]";
        throw QuadratureError(msg.str(), lo, hi);
    }
    return {lo, hi, value, error};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                           const QuadratureOptions& options) {
    if (!(hi > lo)) {
        if (hi == lo) return {};
        QuadratureResult flipped = integrate(f, hi, lo, options);
        flipped.value = -flipped.value;
        return flipped;
    }
    std::priority_queue<Segment> heap;
    Segment first = evaluate(f, lo, hi);
    double total = first.value;
    double total_error = first.error;
    heap.push(first);
    int intervals = 1;
    auto converged = [&] {
        return total_error <= std::max(options.absolute_tolerance,
                                       options.relative_tolerance * std::abs(total));
    };
    while (!converged()) {
        if (intervals >= options.max_intervals) {
            const Segment& worst = heap.top();
            std::ostringstream msg;
            msg << "quadrature did not converge; worst subinterval [" << worst.lo << ", "
                << worst.hi << "] error " << worst.error;
            throw QuadratureError(msg.str(), worst.lo, worst.hi);
        }
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            std::ostringstream msg;
            msg << "quadrature subinterval collapsed near " << mid;
            throw QuadratureError(msg.str(), worst.lo, worst.hi);
        }
        Segment left = evaluate(f, worst.lo, mid);
        Segment right = evaluate(f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
        // Running sums drift; refresh them occasionally.
        if (intervals % 64 == 0) {
            auto copy = heap;
            total = 0.0;
            total_error = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                total_error += copy.top().error;
                copy.pop();
            }
        }
    }
    return {total, total_error, intervals};
}

QuadratureResult integrate_to_infinity(const std::function<double(double)>& f, double lo,
                                       const QuadratureOptions& options) {
    auto mapped = [&](double s) {
        if (s >= 1.0) return 0.0;
        const double one_minus = 1.0 - s;
        const double t = lo + s / one_minus;
        return f(t) / (one_minus * one_minus);
    };
    return integrate(mapped, 0.0, 1.0, options);
}

}  // namespace gfrag
