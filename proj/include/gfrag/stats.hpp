#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gfrag {

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;

    // |mean - target| / stderr, +inf when the standard error is zero and the
    // mean is off target.
    double z_score(double target) const;
    bool within(double target, double sigmas) const { return z_score(target) <= sigmas; }
};

MeanEstimate mean_estimate(std::span<const double> values);

// Joint standard error of a difference of independent estimates.
double joint_stderr(double se_a, double se_b);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t size_a = 0;
    std::size_t size_b = 0;

    bool passes(double level) const { return p_value >= level; }
};

// Two-sample Kolmogorov-Smirnov test, p-value from the asymptotic Kolmogorov
// distribution with the Stephens small-sample correction.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// KS distance between weighted empirical laws; the p-value uses the Kish
// effective sizes in place of the sample counts.
KsResult weighted_ks_two_sample(std::span<const double> a, std::span<const double> weights_a,
                                std::span<const double> b, std::span<const double> weights_b);

// Q_KS(λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}.
double kolmogorov_survival(double lambda);

// Linear-interpolated empirical quantile of unsorted data, p in [0, 1].
double quantile(std::vector<double> values, double p);

// Runs body(i) for i in [0, n) on `threads` workers (0 = hardware
// concurrency). Results must be written by index for determinism.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

// Worker count from GFRAG_THREADS, or 0 when unset.
unsigned default_thread_count();

}  // namespace gfrag
