#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfrag/cell_system.hpp"
#include "gfrag/density_lab.hpp"
#include "gfrag/stats.hpp"

namespace gfrag {

// One area sample under P₁ and its log-domain kernel estimate. Every tilting
// weight divides by this estimate and every inner sample draws from this pool.
class TiltingBase {
public:
    TiltingBase(const TreeModels& models, std::vector<double> base_areas, const BandwidthPolicy& policy = {});

    const TreeModels& models() const noexcept { return *models_; }
    double omega_minus() const { return models_->exponents()[0]; }
    double omega_plus() const { return models_->exponents()[1]; }
    const AreaPool& pool() const noexcept { return pool_; }
    const LogKde& density() const noexcept { return kde_; }
    double bandwidth() const noexcept { return kde_.bandwidth(); }
    double base_density(double r) const { return kde_.density(r); }
    double base_std_error(double r) const { return kde_.std_error(r); }
    double base_quantile(double p) const;

private:
    const TreeModels* models_;
    AreaPool pool_;
    LogKde kde_;
    std::vector<double> sorted_;
};

struct PointEstimate {
    double value = 0.0;
    double std_error = 0.0;
    // Few inner samples near r: relative error above 1/2 (or no mass at all).
    bool wide = false;
};

// Draws of Σ m_i^{ω₋} A_i + D for the retained masses m_i of a generation
// measure, A_i from the pool, D its dropped ω₋ contribution.
std::vector<double> generation_area_samples(const GenerationMeasure& births, const TiltingBase& base,
                                            std::size_t count, Rng& rng);

// Nested Monte Carlo estimate of a(B(n), r), smoothed with the base bandwidth.
PointEstimate conditional_area_density_at(const GenerationMeasure& births, double r, std::size_t inner_samples,
                                          const TiltingBase& base, Rng& rng);

struct TiltedSample {
    CellTree tree;
    double weight = 0.0;
    double weight_std_error = 0.0;
    double target_r = 0.0;
    int generation = 0;
    std::size_t inner_mc_count = 0;
};

struct ConditionalEnsemble {
    std::vector<TiltedSample> samples;
    double effective_sample_size = 0.0;
    double r = 0.0;
    double x = 1.0;
    double bandwidth = 0.0;
    std::uint64_t seed = 0;
    // Systematic-resampling indices into `samples` (empty unless requested).
    std::vector<std::size_t> resampled;

    std::vector<double> weights() const;
    MeanEstimate weight_mean() const;
};

struct ConditioningOptions {
    TruncationPolicy policy;
    std::size_t inner_samples = 1000;
    bool resample = false;
    // Refuse when the base density at r·x^{-ω₋} has a larger relative error.
    double max_denominator_relative_error = 0.25;
};

// N trees under P_x grown to generation n, weighted by
// x^{ω₋} a(B(n), r) / â(r x^{-ω₋}). Throws std::domain_error when the
// denominator is unreliable.
ConditionalEnsemble sample_conditioned(const TiltingBase& base, double x, double r, int n, std::size_t count,
                                       const ConditioningOptions& options, std::uint64_t seed,
                                       unsigned threads = 1);

// `count` indices drawn proportionally to the weights with one uniform.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count, Rng& rng);

double effective_sample_size(std::span<const double> weights);

// Geometric grid between two base quantiles with `extra` points merged in.
std::vector<double> central_r_grid(const TiltingBase& base, std::size_t points, double lower_quantile = 0.005,
                                   double upper_quantile = 0.995, std::span<const double> extra = {});

struct TiltedSetOptions {
    std::size_t trees = 2000;
    std::size_t inner_samples = 1000;
    std::vector<int> generations = {0, 1};
    TruncationPolicy policy;
};

// P₁ trees with the nested density estimates a(B(n), r_k) for every tree,
// listed generation and grid point; the shared raw material of the checks.
struct TiltedTreeSet {
    std::vector<CellTree> trees;
    std::vector<double> areas;
    std::vector<double> r_grid;
    std::vector<int> generations;
    std::vector<double> base_density;
    std::vector<double> base_std_error;
    // [generation index][tree][grid point]
    std::vector<std::vector<std::vector<double>>> density;
    // [generation index][tree]: smoothed mass of A_B below / above the grid.
    std::vector<std::vector<double>> lower_mass;
    std::vector<std::vector<double>> upper_mass;
    std::size_t inner_samples = 0;
    double bandwidth = 0.0;
    double omega_minus = 0.0;

    std::size_t generation_index(int n) const;
    double weight(std::size_t g, std::size_t tree, std::size_t k) const {
        return density[g][tree][k] / base_density[k];
    }
    // Weight mean; the standard error includes the base-density error.
    MeanEstimate weight_mean(std::size_t g, std::size_t k) const;
    // E₁(G | A = r_k) = mean of weight·G over trees.
    MeanEstimate tilted_mean(std::size_t g, std::size_t k, std::span<const double> functional) const;
    // Σ w G / Σ w: the base density cancels and weight noise is damped.
    MeanEstimate normalized_tilted_mean(std::size_t g, std::size_t k, std::span<const double> functional) const;
    // ∫ h(r) a(B(n), r) dr per tree: trapezoid on the grid, h at the grid
    // ends for the mass outside it.
    std::vector<double> integrate_against(std::size_t g, const std::function<double(std::size_t, double)>& h) const;
};

TiltedTreeSet build_tilted_tree_set(const TiltingBase& base, std::vector<double> r_grid,
                                    const TiltedSetOptions& options, std::uint64_t seed, unsigned threads = 1);

struct Comparison {
    std::string label;
    double lhs = 0.0;
    double lhs_se = 0.0;
    double rhs = 0.0;
    double rhs_se = 0.0;
    double gap = 0.0;
    double joint_se = 0.0;
    bool passed = false;

    double z() const { return joint_se > 0.0 ? gap / joint_se : 0.0; }
};

// Paired comparison of two per-tree estimators of the same expectation.
Comparison paired_comparison(std::string label, std::span<const double> lhs, std::span<const double> rhs,
                             double sigmas = 3.0);

struct WeightMeanCell {
    int generation = 0;
    double r = 0.0;
    MeanEstimate weight;
    bool passed = false;
};
std::vector<WeightMeanCell> weight_mean_grid(const TiltedTreeSet& set, std::span<const double> r_values,
                                             double sigmas = 3.0);

// Tilted expectation of a G(n_a)-measurable functional under weights from
// generations n_a and n_b (same trees, paired).
std::vector<Comparison> tower_consistency(const TiltedTreeSet& set, int n_a, int n_b,
                                          std::span<const double> functional, std::span<const double> r_values,
                                          double sigmas = 3.0);

// E₁[G f(A)] by plain Monte Carlo against ∫ E₁[G | A = r] f(r) â(r) dr.
Comparison disintegration_check(const TiltedTreeSet& set, int n, std::span<const double> functional,
                                const std::function<double(double)>& f, std::string label = "disintegration",
                                double sigmas = 3.0);

// M⁻(0) of the P-labelled Eve under the M⁺(0)-tilted law, rebuilt from
// Q⁺ trees stopped at the first swap; `swap_mass` is the tilted spine's mass.
struct SpineSample {
    double minus_sum = 0.0;
    double swap_mass = 0.0;
};
std::vector<SpineSample> plus_tilted_eve_samples(const TreeModels& models, std::size_t count,
                                                 const TruncationPolicy& policy, std::uint64_t seed,
                                                 unsigned threads = 1);

struct LargeAreaPoint {
    double r = 0.0;
    double quantile = 0.0;
    // Self-normalized tilted mean of G.
    MeanEstimate tilted;
    double gap = 0.0;
    double joint_se = 0.0;
    // Mean |weight - M⁺(n)| over trees.
    double l1_gap = 0.0;
};
struct LargeAreaReport {
    int generation = 0;
    std::vector<LargeAreaPoint> points;
    // E₁(G M⁺(n)) two ways: through Q⁺ spine trees and by plain Monte Carlo.
    MeanEstimate spine_limit;
    MeanEstimate plain_limit;
    bool gap_within = false;
    // Heuristic: |gap| does not grow significantly along the grid.
    bool trend_supports = false;
    bool inconclusive = false;
    bool passed = false;
};
LargeAreaReport large_area_limit_check(const TiltedTreeSet& set, std::span<const double> functional,
                                       std::span<const double> r_values, std::span<const double> spine_functional,
                                       double sigmas = 3.0);

// E₁[G(X^{(A^{-1/ω₋})})] against ω₋ ∫ â(x^{-ω₋}) E_x[G | A = 1] x^{-1-ω₋} dx.
// G receives the tree and the rescaling factor b.
Comparison random_rescale_mixture_check(const TiltedTreeSet& set, int n,
                                        const std::function<double(const CellTree&, double)>& functional,
                                        std::string label = "mixture", double sigmas = 3.0);

struct CanonicalCurve {
    double x = 0.0;
    std::size_t count = 0;
    // x^{-ω_Δ} Q̂⁻_x(A > r) on the grid.
    std::vector<double> values;
    std::vector<double> std_errors;
};
struct CanonicalTailReport {
    std::vector<double> r_grid;
    std::vector<CanonicalCurve> curves;
    // Largest |difference| / joint SE between successive curves.
    double max_successive_z = 0.0;
    bool stabilized = false;
    double exponent = 0.0;
    double exponent_se = 0.0;
    double expected_exponent = 0.0;
    bool exponent_within = false;
    // c at the expected exponent, pooled over the curves.
    double constant = 0.0;
    double constant_se = 0.0;
};
// Throws std::domain_error unless α < 0.
CanonicalTailReport canonical_tail_estimate(const TreeModels& models, std::span<const double> x_small,
                                            std::span<const double> r_grid, std::size_t count,
                                            const TruncationPolicy& policy, std::uint64_t seed,
                                            unsigned threads = 1);

}  // namespace gfrag
