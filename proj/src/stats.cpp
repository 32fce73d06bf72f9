#include "gfrag/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace gfrag {

double MeanEstimate::z_score(double target) const {
    const double gap = std::abs(mean - target);
    if (std_error > 0.0) return gap / std_error;
    return gap == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

MeanEstimate mean_estimate(std::span<const double> values) {
    MeanEstimate out;
    out.count = values.size();
    if (values.empty()) return out;
    // Two-pass for accuracy on heavy-tailed samples.
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        const double n = static_cast<double>(values.size());
        out.std_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

double joint_stderr(double se_a, double se_b) { return std::hypot(se_a, se_b); }

double kolmogorov_survival(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult out;
    out.statistic = d;
    out.size_a = a.size();
    out.size_b = b.size();
    const double ne = std::sqrt(na * nb / (na + nb));
    out.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
    return out;
}

KsResult weighted_ks_two_sample(std::span<const double> a, std::span<const double> weights_a,
                                std::span<const double> b, std::span<const double> weights_b) {
    if (a.size() != weights_a.size() || b.size() != weights_b.size())
        throw std::invalid_argument("weighted_ks_two_sample: size mismatch");
    struct Point {
        double value;
        double weight;
        int side;
    };
    std::vector<Point> pts;
    pts.reserve(a.size() + b.size());
    double total_a = 0.0, total_b = 0.0, sq_a = 0.0, sq_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(weights_a[i] >= 0.0)) throw std::invalid_argument("weighted_ks_two_sample: negative weight");
        pts.push_back({a[i], weights_a[i], 0});
        total_a += weights_a[i];
        sq_a += weights_a[i] * weights_a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!(weights_b[i] >= 0.0)) throw std::invalid_argument("weighted_ks_two_sample: negative weight");
        pts.push_back({b[i], weights_b[i], 1});
        total_b += weights_b[i];
        sq_b += weights_b[i] * weights_b[i];
    }
    if (!(total_a > 0.0) || !(total_b > 0.0)) throw std::invalid_argument("weighted_ks_two_sample: zero total weight");
    std::sort(pts.begin(), pts.end(), [](const Point& x, const Point& y) { return x.value < y.value; });
    double fa = 0.0, fb = 0.0, d = 0.0;
    for (std::size_t i = 0; i < pts.size();) {
        const double v = pts[i].value;
        for (; i < pts.size() && pts[i].value == v; ++i) (pts[i].side == 0 ? fa : fb) += pts[i].weight;
        d = std::max(d, std::abs(fa / total_a - fb / total_b));
    }
    const double na = total_a * total_a / sq_a;
    const double nb = total_b * total_b / sq_b;
    KsResult out;
    out.statistic = d;
    out.size_a = a.size();
    out.size_b = b.size();
    const double ne = std::sqrt(na * nb / (na + nb));
    out.p_value = kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d);
    return out;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("GFRAG_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return 0;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace gfrag
