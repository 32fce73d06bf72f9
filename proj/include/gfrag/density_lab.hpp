#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfrag/cell_system.hpp"
#include "gfrag/stats.hpp"

namespace gfrag {

struct BandwidthPolicy {
    enum class Kind { Silverman, PlugIn, Fixed };
    Kind kind = Kind::PlugIn;
    // Log-domain bandwidth for Kind::Fixed.
    double value = 0.0;
    // Multiplies the selected bandwidth (e.g. 0.5 for robustness checks).
    double scale = 1.0;
};

struct DensityGridOptions {
    std::size_t points = 256;
    // Grid spans the log-sample range padded by this many bandwidths.
    double pad_bandwidths = 4.0;
};

struct DensityEstimate {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<double> std_errors;
    // Bandwidth of the Gaussian kernel on log r.
    double bandwidth = 0.0;
    std::size_t sample_count = 0;
    std::string boundary_treatment = "log-transform";

    // Log-linear interpolation on the grid; 0 outside it.
    double value_at(double r) const;
    double integral() const;
    // ∫ r·a(r) dr on the grid.
    double first_moment() const;
};

double silverman_bandwidth(std::span<const double> log_samples);
// Two-stage direct plug-in (normal-reference start, binned functional estimates).
double plugin_bandwidth(std::span<const double> log_samples);

// Log-domain bandwidth for positive samples under a policy.
double select_bandwidth(std::span<const double> samples, const BandwidthPolicy& policy);

// Gaussian kernel density on log r, reported as a density in r.
class LogKde {
public:
    LogKde(std::span<const double> samples, double bandwidth);

    double bandwidth() const noexcept { return bandwidth_; }
    std::size_t size() const noexcept { return logs_.size(); }
    double density(double r) const;
    // Pointwise standard error of density(r) from the kernel-value variance.
    double std_error(double r) const;
    // Distribution function of the smoothed law.
    double cdf(double r) const;

private:
    std::vector<double> logs_;  // sorted
    double bandwidth_;
};

// Throws std::invalid_argument for fewer than `min_samples` samples,
// nonpositive samples, or zero spread.
DensityEstimate estimate_density(std::span<const double> samples, const BandwidthPolicy& policy = {},
                                 const DensityGridOptions& grid = {}, std::size_t min_samples = 1000);

struct TailFitOptions {
    // Slope used for the constant; the fitted exponent when unset.
    std::optional<double> slope;
    // Manual Hill window [k_lo, k_hi]; scanned over [√N, N/10] when unset.
    std::optional<std::pair<std::size_t, std::size_t>> window;
    // A window is a plateau when its Hill spread is within this many standard errors.
    double plateau_sigmas = 3.0;
    std::size_t min_samples = 1000;
};

struct TailFit {
    double exponent = 0.0;
    double exponent_se = 0.0;
    double constant = 0.0;
    double constant_se = 0.0;
    double slope_used = 0.0;
    double fit_lo = 0.0;
    double fit_hi = 0.0;
    std::size_t k_lo = 0;
    std::size_t k_hi = 0;
    bool stable = false;
    // (k, Hill exponent) over the scanned range.
    std::vector<std::pair<std::size_t, double>> hill_plot;
};

TailFit fit_tail(std::span<const double> samples, const TailFitOptions& options = {});

// Power-law fit of the density on [r_lo, r_hi]: weighted least squares of
// log(bin count / bin width) on log r over geometric bins, each bin weighted
// by its count. Density ∝ r^{-1-exponent}.
struct DensityTailFit {
    double exponent = 0.0;
    double exponent_se = 0.0;
    double fit_lo = 0.0;
    double fit_hi = 0.0;
    std::size_t bins_used = 0;
};
DensityTailFit fit_density_tail(std::span<const double> samples, double r_lo, double r_hi, std::size_t bins = 12);

// r ↦ r·a(r) on the same grid.
DensityEstimate size_biased_density(const DensityEstimate& est);

// Draws from a fixed sample with replacement.
class AreaPool {
public:
    explicit AreaPool(std::vector<double> samples);
    double draw(Rng& rng) const;
    double max() const noexcept { return max_; }
    const std::vector<double>& samples() const noexcept { return samples_; }

private:
    std::vector<double> samples_;
    double max_ = 0.0;
};

// Σ x_j^{ω₋} A_j with independent A_j from the pool.
std::vector<double> weighted_sum_samples(std::span<const double> x, double omega_minus,
                                         const AreaPool& pool, std::size_t count, std::uint64_t seed,
                                         unsigned threads = 1);

DensityEstimate weighted_sum_density(std::span<const double> x, double omega_minus,
                                     const AreaPool& pool, std::size_t count, std::uint64_t seed,
                                     const BandwidthPolicy& policy = {}, unsigned threads = 1);

// One draw of Σ γ_i A_i: explicit Ψ-path jumps carry weights γ_i = (mass
// lost)^{ω₋}; fragments below the jump cutoff and the path after the
// truncation point enter with A_i replaced by its mean 1.
struct SmoothingDraw {
    double value = 0.0;
    double truncated_mass = 0.0;
    std::size_t explicit_terms = 0;
};
SmoothingDraw smoothing_transform_draw(const TreeModels& models, const AreaPool& pool, Rng& rng,
                                       double tail_tolerance = 1e-4);
// Σ γ_i A_i for given weights (each A_i drawn from the pool).
double smoothing_transform_draw(std::span<const double> gammas, const AreaPool& pool, Rng& rng);

struct SmoothingReport {
    KsResult ks;
    MeanEstimate transform_mean;
    double mean_truncated_mass = 0.0;
    std::vector<double> transformed;
};
SmoothingReport smoothing_fixpoint_check(std::span<const double> area_samples, const TreeModels& models,
                                         const AreaPool& pool, std::size_t count, std::uint64_t seed,
                                         unsigned threads = 1);

struct AffineReport {
    double level = 0.0;
    KsResult ks;
    std::size_t attempts = 0;
    std::size_t accepted = 0;
    double passage_probability = 0.0;
    double passage_probability_se = 0.0;
    double passage_probability_theory = 0.0;
    MeanEstimate pre_passage_area;  // A⁺(x)
    std::vector<double> conditioned;
    std::vector<double> reconstructed;
};
AffineReport affine_equation_check(const TreeModels& models, double level, std::size_t count,
                                   const TruncationPolicy& policy, std::uint64_t seed, unsigned threads = 1,
                                   std::size_t max_attempts = 0);

}  // namespace gfrag
