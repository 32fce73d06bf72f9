#include "gfrag/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gfrag {

TiltingBase::TiltingBase(const TreeModels& models, std::vector<double> base_areas, const BandwidthPolicy& policy)
    : models_(&models),
      pool_(base_areas),
      kde_(base_areas, select_bandwidth(base_areas, policy)),
      sorted_(std::move(base_areas)) {
    std::sort(sorted_.begin(), sorted_.end());
}

double TiltingBase::base_quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("base_quantile: p must lie in [0, 1]");
    const double pos = p * static_cast<double>(sorted_.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted_.size() - 1);
    return sorted_[lo] + (pos - static_cast<double>(lo)) * (sorted_[hi] - sorted_[lo]);
}

std::vector<double> generation_area_samples(const GenerationMeasure& births, const TiltingBase& base,
                                            std::size_t count, Rng& rng) {
    std::vector<double> weights;
    weights.reserve(births.masses.size());
    for (double m : births.masses) weights.push_back(std::pow(m, base.omega_minus()));
    std::vector<double> out(count, births.dropped_power_sum);
    for (double& s : out) {
        for (double w : weights) s += w * base.pool().draw(rng);
    }
    return out;
}

namespace {

bool has_mass(const GenerationMeasure& births) {
    return !births.masses.empty() || births.dropped_power_sum > 0.0;
}

PointEstimate point_from(const LogKde& kde, double r) {
    PointEstimate e;
    e.value = kde.density(r);
    e.std_error = kde.std_error(r);
    e.wide = !(e.value > 0.0) || e.std_error > 0.5 * e.value;
    return e;
}

std::size_t grid_index(const std::vector<double>& grid, double r) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (std::abs(grid[k] - r) <= 1e-9 * r) return k;
    }
    throw std::invalid_argument("tilted tree set: r = " + std::to_string(r) + " is not on the grid");
}

MeanEstimate with_relative_error(MeanEstimate m, double relative) {
    m.std_error = std::hypot(m.std_error, m.mean * relative);
    return m;
}

}  // namespace

PointEstimate conditional_area_density_at(const GenerationMeasure& births, double r, std::size_t inner_samples,
                                          const TiltingBase& base, Rng& rng) {
    if (!(r > 0.0)) throw std::invalid_argument("conditional_area_density_at: r must be positive");
    if (!has_mass(births)) throw std::invalid_argument("conditional_area_density_at: empty generation measure");
    if (inner_samples == 0) throw std::invalid_argument("conditional_area_density_at: no inner samples");
    const std::vector<double> s = generation_area_samples(births, base, inner_samples, rng);
    return point_from(LogKde(s, base.bandwidth()), r);
}

std::vector<double> ConditionalEnsemble::weights() const {
    std::vector<double> w;
    w.reserve(samples.size());
    for (const TiltedSample& s : samples) w.push_back(s.weight);
    return w;
}

MeanEstimate ConditionalEnsemble::weight_mean() const { return mean_estimate(weights()); }

double effective_sample_size(std::span<const double> weights) {
    double sum = 0.0, sum2 = 0.0;
    for (double w : weights) {
        sum += w;
        sum2 += w * w;
    }
    return sum2 > 0.0 ? sum * sum / sum2 : 0.0;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t count, Rng& rng) {
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("systematic_resample: bad weight");
        total += w;
    }
    if (!(total > 0.0)) throw std::domain_error("systematic_resample: all weights vanish");
    std::vector<std::size_t> out;
    out.reserve(count);
    const double step = total / static_cast<double>(count);
    double target = rng.uniform() * step;
    double cumulative = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < count; ++i) {
        while (j + 1 < weights.size() && cumulative + weights[j] <= target) cumulative += weights[j++];
        out.push_back(j);
        target += step;
    }
    return out;
}

ConditionalEnsemble sample_conditioned(const TiltingBase& base, double x, double r, int n, std::size_t count,
                                       const ConditioningOptions& options, std::uint64_t seed,
                                       unsigned threads) {
    if (!(x > 0.0) || !(r > 0.0)) throw std::invalid_argument("sample_conditioned: x and r must be positive");
    if (n < 0) throw std::invalid_argument("sample_conditioned: n must be nonnegative");
    if (options.policy.max_generation < n + 1) {
        throw std::invalid_argument("sample_conditioned: max_generation must reach generation n + 1");
    }
    const double wm = base.omega_minus();
    const double scaled_r = r * std::pow(x, -wm);
    const double denominator = base.base_density(scaled_r);
    const double denominator_se = base.base_std_error(scaled_r);
    if (!(denominator > 0.0) || denominator_se > options.max_denominator_relative_error * denominator) {
        throw std::domain_error("sample_conditioned: r x^{-omega_-} = " + std::to_string(scaled_r) +
                                " lies outside the reliable range of the base density (estimate " +
                                std::to_string(denominator) + ", std error " + std::to_string(denominator_se) +
                                ")");
    }

    ConditionalEnsemble out;
    out.r = r;
    out.x = x;
    out.bandwidth = base.bandwidth();
    out.seed = seed;
    out.samples.resize(count);
    const double scale = std::pow(x, wm) / denominator;
    parallel_for(count, threads, [&](std::size_t i) {
        TreeOptions o;
        o.x = x;
        o.policy = options.policy;
        o.keep_birth_generations = std::max(o.keep_birth_generations, n + 1);
        Rng tree_rng(seed, Stream::TiltedTrees, i);
        TiltedSample& s = out.samples[i];
        s.tree = sample_cell_system(base.models(), o, tree_rng);
        s.target_r = r;
        s.generation = n;
        s.inner_mc_count = options.inner_samples;
        Rng inner_rng(seed, Stream::InnerAreas, i);
        const PointEstimate a =
            conditional_area_density_at(generation_measure(s.tree, n), r, options.inner_samples, base, inner_rng);
        s.weight = scale * a.value;
        s.weight_std_error = scale * a.std_error;
    });
    const std::vector<double> w = out.weights();
    out.effective_sample_size = effective_sample_size(w);
    if (options.resample) {
        Rng rng(seed, Stream::Resampling, 0);
        out.resampled = systematic_resample(w, count, rng);
    }
    return out;
}

std::vector<double> central_r_grid(const TiltingBase& base, std::size_t points, double lower_quantile,
                                   double upper_quantile, std::span<const double> extra) {
    if (points < 2) throw std::invalid_argument("central_r_grid: need two points");
    const double lo = std::log(base.base_quantile(lower_quantile));
    const double hi = std::log(base.base_quantile(upper_quantile));
    std::vector<double> grid;
    for (std::size_t k = 0; k < points; ++k) {
        grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1)));
    }
    for (double r : extra) {
        if (!(r > 0.0)) throw std::invalid_argument("central_r_grid: extra points must be positive");
        grid.push_back(r);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }),
               grid.end());
    return grid;
}

std::size_t TiltedTreeSet::generation_index(int n) const {
    const auto it = std::find(generations.begin(), generations.end(), n);
    if (it == generations.end()) {
        throw std::invalid_argument("tilted tree set: generation " + std::to_string(n) + " was not computed");
    }
    return static_cast<std::size_t>(it - generations.begin());
}

MeanEstimate TiltedTreeSet::weight_mean(std::size_t g, std::size_t k) const {
    std::vector<double> w(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) w[i] = weight(g, i, k);
    return with_relative_error(mean_estimate(w), base_std_error[k] / base_density[k]);
}

MeanEstimate TiltedTreeSet::tilted_mean(std::size_t g, std::size_t k, std::span<const double> functional) const {
    if (functional.size() != trees.size()) throw std::invalid_argument("tilted_mean: one value per tree expected");
    std::vector<double> v(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) v[i] = weight(g, i, k) * functional[i];
    return with_relative_error(mean_estimate(v), base_std_error[k] / base_density[k]);
}

MeanEstimate TiltedTreeSet::normalized_tilted_mean(std::size_t g, std::size_t k,
                                                   std::span<const double> functional) const {
    if (functional.size() != trees.size()) throw std::invalid_argument("tilted_mean: one value per tree expected");
    double sw = 0.0, swg = 0.0;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        sw += weight(g, i, k);
        swg += weight(g, i, k) * functional[i];
    }
    MeanEstimate out;
    out.count = trees.size();
    if (!(sw > 0.0)) return out;
    out.mean = swg / sw;
    double s2 = 0.0;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        const double e = weight(g, i, k) * (functional[i] - out.mean);
        s2 += e * e;
    }
    out.std_error = std::sqrt(s2) / sw;
    return out;
}

std::vector<double> TiltedTreeSet::integrate_against(std::size_t g,
                                                     const std::function<double(std::size_t, double)>& h) const {
    // Trapezoid in log r, where the kernel estimates are smooth on the bandwidth scale.
    std::vector<double> out(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) {
        const std::vector<double>& a = density[g][i];
        double prev = h(i, r_grid[0]) * a[0] * r_grid[0];
        double total = h(i, r_grid.front()) * lower_mass[g][i];
        for (std::size_t k = 1; k < r_grid.size(); ++k) {
            const double cur = h(i, r_grid[k]) * a[k] * r_grid[k];
            total += 0.5 * (prev + cur) * std::log(r_grid[k] / r_grid[k - 1]);
            prev = cur;
        }
        out[i] = total + h(i, r_grid.back()) * upper_mass[g][i];
    }
    return out;
}

TiltedTreeSet build_tilted_tree_set(const TiltingBase& base, std::vector<double> r_grid,
                                    const TiltedSetOptions& options, std::uint64_t seed, unsigned threads) {
    if (r_grid.size() < 2 || !std::is_sorted(r_grid.begin(), r_grid.end()) || !(r_grid.front() > 0.0)) {
        throw std::invalid_argument("build_tilted_tree_set: r grid must be positive, increasing, two points or more");
    }
    if (options.generations.empty()) throw std::invalid_argument("build_tilted_tree_set: no generations");
    const int deepest = *std::max_element(options.generations.begin(), options.generations.end());
    if (options.policy.max_generation < deepest + 1) {
        throw std::invalid_argument("build_tilted_tree_set: max_generation must reach the deepest generation + 1");
    }
    TiltedTreeSet set;
    set.r_grid = std::move(r_grid);
    set.generations = options.generations;
    set.inner_samples = options.inner_samples;
    set.bandwidth = base.bandwidth();
    set.omega_minus = base.omega_minus();
    for (double r : set.r_grid) {
        set.base_density.push_back(base.base_density(r));
        set.base_std_error.push_back(base.base_std_error(r));
        if (!(set.base_density.back() > 0.0)) {
            throw std::domain_error("build_tilted_tree_set: base density vanishes at r = " + std::to_string(r));
        }
    }
    const std::size_t ng = set.generations.size();
    const std::size_t nt = options.trees;
    set.trees.resize(nt);
    set.areas.resize(nt);
    set.density.assign(ng, std::vector<std::vector<double>>(nt));
    set.lower_mass.assign(ng, std::vector<double>(nt));
    set.upper_mass.assign(ng, std::vector<double>(nt));
    parallel_for(nt, threads, [&](std::size_t i) {
        TreeOptions o;
        o.policy = options.policy;
        o.keep_birth_generations = std::max(o.keep_birth_generations, deepest + 1);
        Rng tree_rng(seed, Stream::TiltedTrees, i);
        set.trees[i] = sample_cell_system(base.models(), o, tree_rng);
        set.areas[i] = estimate_area(set.trees[i]).area;
        Rng inner_rng(seed, Stream::InnerAreas, i);
        for (std::size_t g = 0; g < ng; ++g) {
            const GenerationMeasure births = generation_measure(set.trees[i], set.generations[g]);
            std::vector<double>& row = set.density[g][i];
            row.assign(set.r_grid.size(), 0.0);
            if (!has_mass(births)) {
                set.lower_mass[g][i] = 1.0;
                continue;
            }
            const LogKde kde(generation_area_samples(births, base, options.inner_samples, inner_rng),
                             base.bandwidth());
            for (std::size_t k = 0; k < set.r_grid.size(); ++k) row[k] = kde.density(set.r_grid[k]);
            set.lower_mass[g][i] = kde.cdf(set.r_grid.front());
            set.upper_mass[g][i] = 1.0 - kde.cdf(set.r_grid.back());
        }
    });
    return set;
}

Comparison paired_comparison(std::string label, std::span<const double> lhs, std::span<const double> rhs,
                             double sigmas) {
    if (lhs.size() != rhs.size() || lhs.size() < 2) {
        throw std::invalid_argument("paired_comparison: need two equally long samples");
    }
    std::vector<double> diff(lhs.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) diff[i] = lhs[i] - rhs[i];
    const MeanEstimate l = mean_estimate(lhs), r = mean_estimate(rhs), d = mean_estimate(diff);
    Comparison c;
    c.label = std::move(label);
    c.lhs = l.mean;
    c.lhs_se = l.std_error;
    c.rhs = r.mean;
    c.rhs_se = r.std_error;
    c.gap = d.mean;
    c.joint_se = d.std_error;
    c.passed = std::abs(c.gap) <= sigmas * c.joint_se;
    return c;
}

std::vector<WeightMeanCell> weight_mean_grid(const TiltedTreeSet& set, std::span<const double> r_values,
                                             double sigmas) {
    std::vector<WeightMeanCell> out;
    for (std::size_t g = 0; g < set.generations.size(); ++g) {
        for (double r : r_values) {
            WeightMeanCell c;
            c.generation = set.generations[g];
            c.r = r;
            c.weight = set.weight_mean(g, grid_index(set.r_grid, r));
            c.passed = c.weight.within(1.0, sigmas);
            out.push_back(c);
        }
    }
    return out;
}

std::vector<Comparison> tower_consistency(const TiltedTreeSet& set, int n_a, int n_b,
                                          std::span<const double> functional, std::span<const double> r_values,
                                          double sigmas) {
    if (functional.size() != set.trees.size()) throw std::invalid_argument("tower_consistency: one value per tree");
    const std::size_t ga = set.generation_index(n_a), gb = set.generation_index(n_b);
    std::vector<Comparison> out;
    for (double r : r_values) {
        const std::size_t k = grid_index(set.r_grid, r);
        std::vector<double> a(set.trees.size()), b(set.trees.size());
        for (std::size_t i = 0; i < set.trees.size(); ++i) {
            a[i] = set.weight(ga, i, k) * functional[i];
            b[i] = set.weight(gb, i, k) * functional[i];
        }
        out.push_back(paired_comparison("tower n=" + std::to_string(n_a) + " vs n=" + std::to_string(n_b) +
                                            " r=" + std::to_string(r),
                                        a, b, sigmas));
    }
    return out;
}

Comparison disintegration_check(const TiltedTreeSet& set, int n, std::span<const double> functional,
                                const std::function<double(double)>& f, std::string label, double sigmas) {
    if (functional.size() != set.trees.size()) throw std::invalid_argument("disintegration_check: one value per tree");
    const std::size_t g = set.generation_index(n);
    std::vector<double> lhs(set.trees.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] = functional[i] * f(set.areas[i]);
    std::vector<double> rhs = set.integrate_against(g, [&](std::size_t, double r) { return f(r); });
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] *= functional[i];
    return paired_comparison(std::move(label), lhs, rhs, sigmas);
}

std::vector<SpineSample> plus_tilted_eve_samples(const TreeModels& models, std::size_t count,
                                                 const TruncationPolicy& policy, std::uint64_t seed,
                                                 unsigned threads) {
    policy.check();
    const double wm = models.exponents()[0];
    std::vector<SpineSample> out(count);
    parallel_for(count, threads, [&](std::size_t i) {
        Rng rng(seed, Stream::SpinePlusTrees, i);
        TreeOptions o;
        o.law = TreeLaw::QPlus;
        o.policy = policy;
        o.policy.max_generation = 0;
        o.eve_stop.kind = EveStop::Kind::FirstSwap;
        o.keep_records = true;
        const CellTree spine = sample_cell_system(models, o, rng);
        if (!(spine.eve_first_swap_mass > 0.0)) {
            throw std::runtime_error("plus_tilted_eve_samples: the Eve cell never swapped");
        }
        // The old Eve continues from the swap as the last child of the tracked cell.
        const CellRecord& eve = spine.records.front();
        const auto last = std::max_element(eve.child_birth_times.begin(), eve.child_birth_times.end());
        const double remainder = eve.child_birth_sizes[static_cast<std::size_t>(last - eve.child_birth_times.begin())];

        double remainder_sum = std::pow(remainder, wm);
        if (remainder > policy.mass_floor) {
            TreeOptions p;
            p.x = remainder;
            p.policy = policy;
            p.policy.max_generation = 0;
            p.policy.mass_floor = policy.mass_floor / remainder;
            remainder_sum = sample_cell_system(models, p, rng).power_sum(0, 0);
        }
        SpineSample& s = out[i];
        s.swap_mass = spine.eve_first_swap_mass;
        s.minus_sum = spine.power_sum(0, 0) - std::pow(remainder, wm) + std::pow(s.swap_mass, wm) + remainder_sum;
    });
    return out;
}

LargeAreaReport large_area_limit_check(const TiltedTreeSet& set, std::span<const double> functional,
                                       std::span<const double> r_values, std::span<const double> spine_functional,
                                       double sigmas) {
    if (functional.size() != set.trees.size()) throw std::invalid_argument("large_area_limit_check: one value per tree");
    if (r_values.empty()) throw std::invalid_argument("large_area_limit_check: empty r grid");
    LargeAreaReport rep;
    rep.generation = set.generations.front();
    const std::size_t g = 0;
    const std::size_t nt = set.trees.size();
    std::vector<double> plus(nt), plain(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        plus[i] = intrinsic_martingales(set.trees[i], rep.generation).plus;
        plain[i] = functional[i] * plus[i];
    }
    rep.plain_limit = mean_estimate(plain);
    rep.spine_limit = mean_estimate(spine_functional);
    for (double r : r_values) {
        const std::size_t k = grid_index(set.r_grid, r);
        LargeAreaPoint p;
        p.r = r;
        p.quantile = static_cast<double>(std::count_if(set.areas.begin(), set.areas.end(),
                                                       [&](double a) { return a <= r; })) /
                     static_cast<double>(nt);
        p.tilted = set.normalized_tilted_mean(g, k, functional);
        p.gap = p.tilted.mean - rep.spine_limit.mean;
        p.joint_se = joint_stderr(p.tilted.std_error, rep.spine_limit.std_error);
        double l1 = 0.0;
        for (std::size_t i = 0; i < nt; ++i) l1 += std::abs(set.weight(g, i, k) - plus[i]);
        p.l1_gap = l1 / static_cast<double>(nt);
        rep.points.push_back(p);
    }
    const LargeAreaPoint& first = rep.points.front();
    const LargeAreaPoint& last = rep.points.back();
    rep.gap_within = std::abs(last.gap) <= sigmas * last.joint_se;
    rep.trend_supports =
        std::abs(last.gap) <= std::abs(first.gap) + sigmas * std::hypot(first.joint_se, last.joint_se);
    const std::size_t k_last = grid_index(set.r_grid, last.r);
    rep.inconclusive = set.base_std_error[k_last] > 0.25 * set.base_density[k_last];
    rep.passed = rep.gap_within && rep.trend_supports && !rep.inconclusive;
    return rep;
}

Comparison random_rescale_mixture_check(const TiltedTreeSet& set, int n,
                                        const std::function<double(const CellTree&, double)>& functional,
                                        std::string label, double sigmas) {
    const std::size_t g = set.generation_index(n);
    const double inv = -1.0 / set.omega_minus;
    std::vector<double> lhs(set.trees.size());
    for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] = functional(set.trees[i], std::pow(set.areas[i], inv));
    // x = r^{-1/ω₋} turns ω₋ â(x^{-ω₋}) E_x[G | A = 1] x^{-1-ω₋} dx into an r-integral.
    const std::vector<double> rhs = set.integrate_against(
        g, [&](std::size_t i, double r) { return functional(set.trees[i], std::pow(r, inv)); });
    return paired_comparison(std::move(label), lhs, rhs, sigmas);
}

CanonicalTailReport canonical_tail_estimate(const TreeModels& models, std::span<const double> x_small,
                                            std::span<const double> r_grid, std::size_t count,
                                            const TruncationPolicy& policy, std::uint64_t seed,
                                            unsigned threads) {
    if (!(models.alpha() < 0.0)) {
        throw std::domain_error("canonical_tail_estimate: the small-mass limit needs a negative index alpha");
    }
    if (x_small.empty() || r_grid.empty() || count < 2) {
        throw std::invalid_argument("canonical_tail_estimate: need masses, a grid and samples");
    }
    const double wm = models.exponents()[0];
    const double wd = models.exponents()[1] - wm;
    CanonicalTailReport rep;
    rep.r_grid.assign(r_grid.begin(), r_grid.end());
    rep.expected_exponent = wd / wm;
    for (std::size_t j = 0; j < x_small.size(); ++j) {
        const double x = x_small[j];
        std::vector<double> areas(count);
        parallel_for(count, threads, [&](std::size_t i) {
            TreeOptions o;
            o.law = TreeLaw::QMinus;
            o.x = x;
            o.policy = policy;
            Rng rng(seed, Stream::CanonicalTrees, (static_cast<std::uint64_t>(j) << 40) | i);
            areas[i] = estimate_area(sample_cell_system(models, o, rng)).area;
        });
        CanonicalCurve curve;
        curve.x = x;
        curve.count = count;
        const double scale = std::pow(x, -wd);
        const double nd = static_cast<double>(count);
        for (double r : r_grid) {
            const double p =
                static_cast<double>(std::count_if(areas.begin(), areas.end(), [&](double a) { return a > r; })) / nd;
            curve.values.push_back(scale * p);
            curve.std_errors.push_back(scale * std::sqrt(p * (1.0 - p) / nd));
        }
        rep.curves.push_back(std::move(curve));
    }
    for (std::size_t j = 0; j + 1 < rep.curves.size(); ++j) {
        for (std::size_t k = 0; k < r_grid.size(); ++k) {
            const double se = std::hypot(rep.curves[j].std_errors[k], rep.curves[j + 1].std_errors[k]);
            if (se > 0.0) {
                rep.max_successive_z =
                    std::max(rep.max_successive_z, std::abs(rep.curves[j].values[k] - rep.curves[j + 1].values[k]) / se);
            }
        }
    }
    rep.stabilized = rep.max_successive_z < 3.0;

    // Weighted least squares of log value on log r over all curves.
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double cw = 0.0, cs = 0.0;
    for (const CanonicalCurve& c : rep.curves) {
        for (std::size_t k = 0; k < r_grid.size(); ++k) {
            const double v = c.values[k], se = c.std_errors[k];
            if (!(v > 0.0) || !(se > 0.0)) continue;
            const double w = (v / se) * (v / se);
            const double lx = std::log(r_grid[k]), ly = std::log(v);
            sw += w;
            sx += w * lx;
            sy += w * ly;
            sxx += w * lx * lx;
            sxy += w * lx * ly;
            const double scaled = std::pow(r_grid[k], rep.expected_exponent);
            const double wc = 1.0 / ((se * scaled) * (se * scaled));
            cw += wc;
            cs += wc * v * scaled;
        }
    }
    const double det = sw * sxx - sx * sx;
    if (!(det > 0.0)) throw std::runtime_error("canonical_tail_estimate: too few exceedances to fit the tail");
    rep.exponent = -(sw * sxy - sx * sy) / det;
    rep.exponent_se = std::sqrt(sw / det);
    rep.exponent_within = std::abs(rep.exponent / rep.expected_exponent - 1.0) <= 0.1;
    rep.constant = cs / cw;
    rep.constant_se = 1.0 / std::sqrt(cw);
    return rep;
}

}  // namespace gfrag
