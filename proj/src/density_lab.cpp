#include "gfrag/density_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gfrag {

namespace {

constexpr double inv_sqrt_2pi = 0.39894228040143267794;

double gauss(double x) { return inv_sqrt_2pi * std::exp(-0.5 * x * x); }

std::vector<double> logs_of(std::span<const double> samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (double s : samples) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("density: samples must be positive and finite");
        }
        out.push_back(std::log(s));
    }
    return out;
}

double robust_scale(std::span<const double> z) {
    const MeanEstimate m = mean_estimate(z);
    const double sd = m.std_error * std::sqrt(static_cast<double>(z.size()));
    std::vector<double> copy(z.begin(), z.end());
    const double iqr = quantile(copy, 0.75) - quantile(copy, 0.25);
    const double s = iqr > 0.0 ? std::min(sd, iqr / 1.349) : sd;
    return s;
}

// ψ_r = n^{-2} Σ_i Σ_j φ^{(r)}_g(z_i - z_j) on linearly binned data.
double binned_functional(std::span<const double> z, int r, double g) {
    const std::size_t bins = 1024;
    const auto [lo_it, hi_it] = std::minmax_element(z.begin(), z.end());
    const double lo = *lo_it;
    const double width = (*hi_it - lo) / static_cast<double>(bins - 1);
    std::vector<double> counts(bins, 0.0);
    for (double v : z) {
        const double pos = (v - lo) / width;
        const auto k = std::min(static_cast<std::size_t>(pos), bins - 2);
        const double frac = pos - static_cast<double>(k);
        counts[k] += 1.0 - frac;
        counts[k + 1] += frac;
    }
    auto deriv = [r](double x) {
        const double x2 = x * x;
        const double poly = r == 4 ? (x2 * x2 - 6.0 * x2 + 3.0)
                                   : (x2 * x2 * x2 - 15.0 * x2 * x2 + 45.0 * x2 - 15.0);
        return poly * gauss(x);
    };
    const auto reach = std::min(bins - 1, static_cast<std::size_t>(std::ceil(10.0 * g / width)));
    double total = 0.0;
    for (std::size_t lag = 0; lag <= reach; ++lag) {
        double s = 0.0;
        for (std::size_t k = 0; k + lag < bins; ++k) s += counts[k] * counts[k + lag];
        total += (lag == 0 ? 1.0 : 2.0) * s * deriv(static_cast<double>(lag) * width / g);
    }
    const double n = static_cast<double>(z.size());
    return total / (n * n * std::pow(g, r + 1));
}

}  // namespace

double silverman_bandwidth(std::span<const double> z) {
    if (z.size() < 2) throw std::invalid_argument("bandwidth: need at least two samples");
    const double s = robust_scale(z);
    if (!(s > 0.0)) throw std::invalid_argument("bandwidth: samples have zero spread");
    return 0.9 * s * std::pow(static_cast<double>(z.size()), -0.2);
}

double plugin_bandwidth(std::span<const double> z) {
    const double fallback = silverman_bandwidth(z);
    const double s = robust_scale(z);
    const double n = static_cast<double>(z.size());
    const double psi8 = 105.0 / (32.0 * std::sqrt(M_PI) * std::pow(s, 9));
    const double g1 = std::pow(30.0 * inv_sqrt_2pi / (psi8 * n), 1.0 / 9.0);
    const double psi6 = binned_functional(z, 6, g1);
    if (!(psi6 < 0.0)) return fallback;
    const double g2 = std::pow(-6.0 * inv_sqrt_2pi / (psi6 * n), 1.0 / 7.0);
    const double psi4 = binned_functional(z, 4, g2);
    if (!(psi4 > 0.0)) return fallback;
    const double h = std::pow(1.0 / (2.0 * std::sqrt(M_PI) * psi4 * n), 0.2);
    return std::isfinite(h) && h > 0.0 ? h : fallback;
}

LogKde::LogKde(std::span<const double> samples, double bandwidth)
    : logs_(logs_of(samples)), bandwidth_(bandwidth) {
    if (logs_.empty()) throw std::invalid_argument("LogKde: no samples");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("LogKde: bandwidth must be positive");
    std::sort(logs_.begin(), logs_.end());
}

namespace {

template <class F>
void for_kernel_window(const std::vector<double>& logs, double z, double h, F&& f) {
    const auto lo = std::lower_bound(logs.begin(), logs.end(), z - 9.0 * h);
    const auto hi = std::upper_bound(lo, logs.end(), z + 9.0 * h);
    for (auto it = lo; it != hi; ++it) f(gauss((z - *it) / h) / h);
}

}  // namespace

double LogKde::density(double r) const {
    if (!(r > 0.0)) return 0.0;
    double sum = 0.0;
    for_kernel_window(logs_, std::log(r), bandwidth_, [&](double k) { sum += k; });
    return sum / static_cast<double>(logs_.size()) / r;
}

double LogKde::std_error(double r) const {
    if (!(r > 0.0)) return 0.0;
    double sum = 0.0, sum2 = 0.0;
    for_kernel_window(logs_, std::log(r), bandwidth_, [&](double k) {
        sum += k;
        sum2 += k * k;
    });
    const double n = static_cast<double>(logs_.size());
    const double mean = sum / n;
    return std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n) / r;
}

double LogKde::cdf(double r) const {
    if (!(r > 0.0)) return 0.0;
    const double z = std::log(r);
    // Kernels more than 9 bandwidths away contribute 0 or 1.
    const auto lo = std::lower_bound(logs_.begin(), logs_.end(), z - 9.0 * bandwidth_);
    const auto hi = std::upper_bound(lo, logs_.end(), z + 9.0 * bandwidth_);
    double sum = static_cast<double>(lo - logs_.begin());
    for (auto it = lo; it != hi; ++it) sum += 0.5 * std::erfc((*it - z) / (bandwidth_ * std::sqrt(2.0)));
    return sum / static_cast<double>(logs_.size());
}

double DensityEstimate::value_at(double r) const {
    if (grid.empty() || !(r >= grid.front()) || !(r <= grid.back())) return 0.0;
    const auto it = std::upper_bound(grid.begin(), grid.end(), r);
    if (it == grid.end()) return values.back();
    const auto k = static_cast<std::size_t>(it - grid.begin());
    const double t = std::log(r / grid[k - 1]) / std::log(grid[k] / grid[k - 1]);
    return values[k - 1] + t * (values[k] - values[k - 1]);
}

double DensityEstimate::integral() const {
    double total = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        total += 0.5 * (values[k] + values[k - 1]) * (grid[k] - grid[k - 1]);
    }
    return total;
}

double DensityEstimate::first_moment() const {
    double total = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        total += 0.5 * (grid[k] * values[k] + grid[k - 1] * values[k - 1]) * (grid[k] - grid[k - 1]);
    }
    return total;
}

double select_bandwidth(std::span<const double> samples, const BandwidthPolicy& policy) {
    double h = 0.0;
    switch (policy.kind) {
        case BandwidthPolicy::Kind::Silverman: h = silverman_bandwidth(logs_of(samples)); break;
        case BandwidthPolicy::Kind::PlugIn: h = plugin_bandwidth(logs_of(samples)); break;
        case BandwidthPolicy::Kind::Fixed: h = policy.value; break;
    }
    h *= policy.scale;
    if (!(h > 0.0)) throw std::invalid_argument("select_bandwidth: bandwidth must be positive");
    return h;
}

DensityEstimate estimate_density(std::span<const double> samples, const BandwidthPolicy& policy,
                                 const DensityGridOptions& options, std::size_t min_samples) {
    if (samples.size() < min_samples) {
        throw std::invalid_argument("estimate_density: need at least " + std::to_string(min_samples) +
                                    " samples, got " + std::to_string(samples.size()));
    }
    if (options.points < 2) throw std::invalid_argument("estimate_density: grid needs two points");
    const std::vector<double> z = logs_of(samples);
    const auto [lo_it, hi_it] = std::minmax_element(z.begin(), z.end());
    if (*lo_it == *hi_it) throw std::invalid_argument("estimate_density: samples have zero variance");
    const double h = select_bandwidth(samples, policy);

    const LogKde kde(samples, h);
    DensityEstimate est;
    est.bandwidth = h;
    est.sample_count = samples.size();
    const double z0 = *lo_it - options.pad_bandwidths * h;
    const double z1 = *hi_it + options.pad_bandwidths * h;
    const double step = (z1 - z0) / static_cast<double>(options.points - 1);
    for (std::size_t k = 0; k < options.points; ++k) {
        const double r = std::exp(z0 + step * static_cast<double>(k));
        est.grid.push_back(r);
        est.values.push_back(kde.density(r));
        est.std_errors.push_back(kde.std_error(r));
    }
    return est;
}

TailFit fit_tail(std::span<const double> samples, const TailFitOptions& options) {
    const std::size_t n = samples.size();
    if (n < options.min_samples) {
        throw std::invalid_argument("fit_tail: need at least " + std::to_string(options.min_samples) +
                                    " samples, got " + std::to_string(n));
    }
    std::vector<double> logs = logs_of(samples);
    std::sort(logs.begin(), logs.end(), std::greater<>());
    // prefix[k] = Σ_{i<k} log x_(i+1)
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + logs[i];
    auto hill = [&](std::size_t k) { return 1.0 / (prefix[k] / static_cast<double>(k) - logs[k]); };

    TailFit fit;
    std::size_t k_lo = 0, k_hi = 0;
    if (options.window) {
        k_lo = std::max<std::size_t>(options.window->first, 2);
        k_hi = std::min(options.window->second, n - 1);
        if (k_lo >= k_hi) throw std::invalid_argument("fit_tail: empty manual window");
        fit.stable = true;
        for (std::size_t k : {k_lo, k_hi}) fit.hill_plot.emplace_back(k, hill(k));
    } else {
        const double scan_lo = std::sqrt(static_cast<double>(n));
        const double scan_hi = static_cast<double>(n) / 10.0;
        const int points = 41;
        std::vector<std::size_t> ks;
        for (int j = 0; j < points; ++j) {
            const auto k = static_cast<std::size_t>(
                std::llround(scan_lo * std::pow(scan_hi / scan_lo, j / double(points - 1))));
            if (ks.empty() || k > ks.back()) ks.push_back(k);
        }
        for (std::size_t k : ks) fit.hill_plot.emplace_back(k, hill(k));
        // A plateau is a stretch k..2k whose Hill spread is consistent with
        // noise; the flattest such stretch wins.
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < ks.size(); ++a) {
            std::size_t b = a;
            while (b + 1 < ks.size() && ks[b] < 2 * ks[a]) ++b;
            if (ks[b] < 2 * ks[a]) break;
            double lo = fit.hill_plot[a].second, hi = lo, sum = 0.0;
            for (std::size_t c = a; c <= b; ++c) {
                lo = std::min(lo, fit.hill_plot[c].second);
                hi = std::max(hi, fit.hill_plot[c].second);
                sum += fit.hill_plot[c].second;
            }
            const double mean = sum / static_cast<double>(b - a + 1);
            const double ratio = (hi - lo) / (mean / std::sqrt(static_cast<double>(ks[a])));
            if (ratio < best_ratio) {
                best_ratio = ratio;
                k_lo = ks[a];
                k_hi = ks[b];
            }
        }
        fit.stable = best_ratio <= options.plateau_sigmas;
        if (k_lo == 0) throw std::invalid_argument("fit_tail: sample too small for a Hill scan");
    }

    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [k, value] : fit.hill_plot) {
        if (k >= k_lo && k <= k_hi) {
            sum += value;
            ++count;
        }
    }
    fit.k_lo = k_lo;
    fit.k_hi = k_hi;
    const double k_mid = std::sqrt(static_cast<double>(k_lo) * static_cast<double>(k_hi));
    fit.exponent = sum / static_cast<double>(count);
    fit.exponent_se = fit.exponent / std::sqrt(k_mid);
    fit.slope_used = options.slope.value_or(fit.exponent);
    // log P̂(A ≥ x_(i)) = log(i/N) ≈ log c - β log x_(i) over ranks k_lo..k_hi.
    double log_c = 0.0;
    for (std::size_t i = k_lo; i <= k_hi; ++i) {
        log_c += std::log(static_cast<double>(i) / static_cast<double>(n)) + fit.slope_used * logs[i - 1];
    }
    log_c /= static_cast<double>(k_hi - k_lo + 1);
    fit.constant = std::exp(log_c);
    fit.constant_se = fit.constant / std::sqrt(k_mid);
    fit.fit_lo = std::exp(logs[k_hi - 1]);
    fit.fit_hi = std::exp(logs[k_lo - 1]);
    return fit;
}

DensityTailFit fit_density_tail(std::span<const double> samples, double r_lo, double r_hi, std::size_t bins) {
    if (!(r_lo > 0.0 && r_hi > r_lo) || bins < 3) {
        throw std::invalid_argument("fit_density_tail: need 0 < r_lo < r_hi and at least 3 bins");
    }
    const double step = std::log(r_hi / r_lo) / static_cast<double>(bins);
    std::vector<double> counts(bins, 0.0);
    for (double v : samples) {
        if (!(v >= r_lo && v < r_hi)) continue;
        const auto b = std::min(bins - 1, static_cast<std::size_t>(std::log(v / r_lo) / step));
        counts[b] += 1.0;
    }
    double sw = 0.0, sx = 0.0, sy = 0.0;
    std::vector<std::array<double, 3>> points;
    for (std::size_t b = 0; b < bins; ++b) {
        if (counts[b] == 0.0) continue;
        const double lo = r_lo * std::exp(step * static_cast<double>(b));
        const double x = std::log(lo) + 0.5 * step;
        const double y = std::log(counts[b] / (lo * std::expm1(step)));
        points.push_back({x, y, counts[b]});
        sw += counts[b];
        sx += counts[b] * x;
        sy += counts[b] * y;
    }
    if (points.size() < 3) throw std::invalid_argument("fit_density_tail: fewer than 3 occupied bins");
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y, w] : points) {
        sxx += w * (x - mx) * (x - mx);
        sxy += w * (x - mx) * (y - my);
    }
    DensityTailFit fit;
    fit.exponent = -sxy / sxx - 1.0;
    fit.exponent_se = 1.0 / std::sqrt(sxx);
    fit.fit_lo = r_lo;
    fit.fit_hi = r_hi;
    fit.bins_used = points.size();
    return fit;
}

DensityEstimate size_biased_density(const DensityEstimate& est) {
    DensityEstimate out = est;
    for (std::size_t k = 0; k < out.grid.size(); ++k) {
        out.values[k] *= out.grid[k];
        if (k < out.std_errors.size()) out.std_errors[k] *= out.grid[k];
    }
    return out;
}

AreaPool::AreaPool(std::vector<double> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) throw std::invalid_argument("AreaPool: empty sample");
    max_ = *std::max_element(samples_.begin(), samples_.end());
}

double AreaPool::draw(Rng& rng) const { return samples_[rng.below(samples_.size())]; }

std::vector<double> weighted_sum_samples(std::span<const double> x, double omega_minus,
                                         const AreaPool& pool, std::size_t count, std::uint64_t seed,
                                         unsigned threads) {
    std::vector<double> weights;
    for (double v : x) {
        if (v < 0.0 || !std::isfinite(v)) throw std::invalid_argument("weighted_sum: entries must be finite and >= 0");
        if (v > 0.0) weights.push_back(std::pow(v, omega_minus));
    }
    if (weights.empty()) throw std::invalid_argument("weighted_sum: x must not be the null sequence");
    std::vector<double> out(count);
    parallel_for(count, threads, [&](std::size_t i) {
        Rng rng(seed, Stream::PairedAreas, i);
        double s = 0.0;
        for (double w : weights) s += w * pool.draw(rng);
        out[i] = s;
    });
    return out;
}

DensityEstimate weighted_sum_density(std::span<const double> x, double omega_minus,
                                     const AreaPool& pool, std::size_t count, std::uint64_t seed,
                                     const BandwidthPolicy& policy, unsigned threads) {
    const std::vector<double> s = weighted_sum_samples(x, omega_minus, pool, count, seed, threads);
    return estimate_density(s, policy);
}

namespace {

struct SmoothingVisitor {
    const PathModel& model;
    const AreaPool& pool;
    Rng& rng;
    double omega;
    double small_moment;
    double log_stop;
    double value = 0.0;
    double small_part = 0.0;
    double level = 0.0;
    std::size_t terms = 0;

    bool segment(double t0, double t1, double x0, double x1) {
        small_part += small_moment * bridge_exponential_integral(x0, x1, t1 - t0, omega, model.gaussian_variance());
        level = x1;
        return level > log_stop;
    }
    bool jump(const PathJump& j) {
        value += std::pow(std::exp(j.level_before) * j.child_fraction, omega) * pool.draw(rng);
        ++terms;
        level = j.level_before + j.size;
        return level > log_stop;
    }
};

}  // namespace

SmoothingDraw smoothing_transform_draw(const TreeModels& models, const AreaPool& pool, Rng& rng,
                                       double tail_tolerance) {
    const PathModel& model = models.model(ExponentKind::Psi);
    const double omega = models.exponents()[0];
    // Stop once e^{ω₋ξ}·max(A) < tolerance: e^{ω₋ξ} is the expected remaining Σγ.
    const double log_stop = std::log(tail_tolerance / pool.max()) / omega;
    SmoothingVisitor v{model, pool, rng, omega, models.small_fragment_moment(0), log_stop};
    run_path(model, 1e4, models.path_config().time_step, rng, v);
    SmoothingDraw out;
    out.truncated_mass = std::exp(omega * v.level);
    out.value = v.value + v.small_part + out.truncated_mass;
    out.explicit_terms = v.terms;
    return out;
}

double smoothing_transform_draw(std::span<const double> gammas, const AreaPool& pool, Rng& rng) {
    double s = 0.0;
    for (double g : gammas) s += g * pool.draw(rng);
    return s;
}

SmoothingReport smoothing_fixpoint_check(std::span<const double> area_samples, const TreeModels& models,
                                         const AreaPool& pool, std::size_t count, std::uint64_t seed,
                                         unsigned threads) {
    SmoothingReport report;
    report.transformed.resize(count);
    std::vector<double> truncated(count);
    parallel_for(count, threads, [&](std::size_t i) {
        Rng rng(seed, Stream::LevyPaths, i);
        const SmoothingDraw d = smoothing_transform_draw(models, pool, rng);
        report.transformed[i] = d.value;
        truncated[i] = d.truncated_mass;
    });
    report.ks = ks_two_sample({area_samples.begin(), area_samples.end()}, report.transformed);
    report.transform_mean = mean_estimate(report.transformed);
    report.mean_truncated_mass = mean_estimate(truncated).mean;
    return report;
}

AffineReport affine_equation_check(const TreeModels& models, double level, std::size_t count,
                                   const TruncationPolicy& policy, std::uint64_t seed, unsigned threads,
                                   std::size_t max_attempts) {
    if (!(level > 0.0 && level <= 2.0)) throw std::invalid_argument("affine_equation_check: level must lie in (0, 2]");
    const double omega_minus = models.profile().omega_minus();
    AffineReport report;
    report.level = level;
    report.passage_probability_theory = std::exp(-level * models.profile().omega_delta());
    if (max_attempts == 0) {
        max_attempts = static_cast<std::size_t>(50.0 * static_cast<double>(count) / report.passage_probability_theory);
    }

    TreeOptions minus;
    minus.law = TreeLaw::QMinus;
    minus.policy = policy;
    minus.watch_level = level;
    // Attempts run in fixed-size batches; acceptance is read in index order.
    const std::size_t batch = std::max<std::size_t>(256, count);
    std::vector<double> areas(batch);
    std::vector<char> passed(batch);
    while (report.accepted < count) {
        if (report.attempts >= max_attempts) {
            throw std::runtime_error("affine_equation_check: rejection starvation after " +
                                     std::to_string(report.attempts) + " attempts");
        }
        const std::size_t base = report.attempts;
        parallel_for(batch, threads, [&](std::size_t j) {
            Rng rng(seed, Stream::SpineMinusTrees, base + j);
            const CellTree tree = sample_cell_system(models, minus, rng);
            areas[j] = estimate_area(tree).area;
            passed[j] = tree.eve_passed_level;
        });
        for (std::size_t j = 0; j < batch && report.accepted < count; ++j) {
            ++report.attempts;
            if (passed[j]) {
                report.conditioned.push_back(areas[j]);
                ++report.accepted;
            }
        }
    }
    const double p = static_cast<double>(report.accepted) / static_cast<double>(report.attempts);
    report.passage_probability = p;
    report.passage_probability_se = std::sqrt(p * (1.0 - p) / static_cast<double>(report.attempts));

    TreeOptions plus;
    plus.law = TreeLaw::QPlus;
    plus.policy = policy;
    plus.eve_stop = {EveStop::Kind::PassageAbove, level};
    TreeOptions fresh;
    fresh.law = TreeLaw::QMinus;
    fresh.policy = policy;
    std::vector<double> pre(count);
    report.reconstructed.resize(count);
    const double restart = std::exp(level * omega_minus);
    parallel_for(count, threads, [&](std::size_t i) {
        Rng rng_plus(seed, Stream::SpinePlusTrees, i);
        pre[i] = estimate_area(sample_cell_system(models, plus, rng_plus)).area;
        Rng rng_minus(seed, Stream::PairedAreas, i);
        const double after = estimate_area(sample_cell_system(models, fresh, rng_minus)).area;
        report.reconstructed[i] = pre[i] + restart * after;
    });
    report.pre_passage_area = mean_estimate(pre);
    report.ks = ks_two_sample(report.conditioned, report.reconstructed);
    return report;
}

}  // namespace gfrag
