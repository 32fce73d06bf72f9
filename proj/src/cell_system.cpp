#include "gfrag/cell_system.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "gfrag/quadrature.hpp"

namespace gfrag {

namespace {
constexpr double infinity = std::numeric_limits<double>::infinity();
}

double SsmpTrajectory::value_at(double t) const {
    if (t >= lifetime || grid_times.empty()) return 0.0;
    if (t <= grid_times.front()) return values.front();
    const auto it = std::upper_bound(grid_times.begin(), grid_times.end(), t);
    return values[static_cast<std::size_t>(it - grid_times.begin()) - 1];
}

SsmpTrajectory lamperti_transform(const SkeletonPath& path, const PathModel& model, double alpha,
                                  double x0) {
    if (!(x0 > 0.0)) throw std::invalid_argument("lamperti_transform: x0 must be positive");
    if (path.grid_times.empty()) throw std::invalid_argument("lamperti_transform: empty path");
    SsmpTrajectory w;
    w.initial_mass = x0;
    const double clock = std::pow(x0, -alpha);
    w.grid_times.reserve(path.grid_times.size());
    w.values.reserve(path.values.size());
    w.grid_times.push_back(0.0);
    w.values.push_back(x0 * std::exp(path.values.front()));
    double integral = 0.0;
    for (std::size_t k = 1; k < path.grid_times.size(); ++k) {
        const double h = path.grid_times[k] - path.grid_times[k - 1];
        integral += bridge_exponential_integral(path.values[k - 1], path.value_before_knot(k), h,
                                                -alpha, path.gaussian_variance);
        const double t = clock * integral;
        w.grid_times.push_back(t);
        w.values.push_back(x0 * std::exp(path.values[k]));
        if (path.jump_at[k] >= 0) {
            const PathJump& j = path.jumps[static_cast<std::size_t>(path.jump_at[k])];
            w.jumps.push_back({t, x0 * std::exp(j.level_before) * std::expm1(j.size)});
        }
    }
    if (alpha < 0.0) {
        const ExtendedReal e = model.exponent(-alpha);
        if (e.is_finite() && e.value() < 0.0) {
            w.lifetime = clock * (integral + std::exp(-alpha * path.values.back()) / -e.value());
        }
    }
    return w;
}

SsmpTrajectory rescale_trajectory(const SsmpTrajectory& w, double b, double alpha) {
    if (!(b > 0.0)) throw std::invalid_argument("rescale_trajectory: b must be positive");
    const double stretch = std::pow(b, -alpha);
    SsmpTrajectory out = w;
    out.initial_mass *= b;
    for (double& t : out.grid_times) t *= stretch;
    for (double& v : out.values) v *= b;
    for (TrajectoryJump& j : out.jumps) {
        j.time *= stretch;
        j.size *= b;
    }
    out.lifetime *= stretch;
    return out;
}

const char* tree_law_name(TreeLaw law) {
    switch (law) {
        case TreeLaw::P: return "P";
        case TreeLaw::QMinus: return "Q-";
        case TreeLaw::QPlus: return "Q+";
    }
    return "unknown";
}

void TruncationPolicy::check() const {
    if (!(mass_floor > 0.0 && mass_floor < 1.0)) {
        throw std::invalid_argument("truncation policy: mass_floor must lie in (0, 1)");
    }
    if (max_generation < 0) throw std::invalid_argument("truncation policy: max_generation must be >= 0");
    if (max_cells < 1) throw std::invalid_argument("truncation policy: max_cells must be >= 1");
    if (!(max_levy_time > 0.0)) throw std::invalid_argument("truncation policy: max_levy_time must be positive");
}

namespace {

std::size_t kind_index(ExponentKind kind) { return static_cast<std::size_t>(kind); }

// Expected Σ (child mass)^p per unit time for a cell at unit mass.
double children_rate(const PathModel& m, double p) {
    const JumpMeasure& nu = m.jumps();
    if (nu.is_null()) return 0.0;
    const double cut = m.cutoff_u();
    const double w = m.tilt();
    const QuadratureOptions opts{1e-12, 1e-300, 4000};
    auto loss = [&](double u) {
        return std::exp(p * std::log(u) + w * std::log1p(-u)) * nu.density_u(u);
    };
    double rate = integrate(loss, cut, 1.0, opts).value + m.small_fragment_moment(p);
    if (m.kind() != ExponentKind::Psi) {
        auto swap = [&](double u) {
            return std::exp(p * std::log1p(-u) + w * std::log(u)) * nu.density_u(u);
        };
        rate += integrate(swap, cut, 1.0, opts).value + nu.partial_moment(w, 0.0, cut);
    }
    return rate;
}

}  // namespace

TreeModels::TreeModels(const CumulantProfile& profile, const PathConfig& path)
    : profile_(profile), path_(path) {
    path_.check();
    for (ExponentKind kind : {ExponentKind::Psi, ExponentKind::PhiMinus, ExponentKind::PhiPlus}) {
        models_.push_back(PathModel::build(profile_, kind, path_.cutoff_u()));
    }
    const double lo = profile_.omega_minus();
    const double hi = profile_.omega_plus();
    exponents_ = {lo, hi, 0.5 * (lo + hi)};
    for (const PathModel& m : models_) {
        std::vector<double> row;
        for (double p : exponents_) {
            const ExtendedReal e = m.exponent(p);
            row.push_back(e.is_finite() && e.value() < 0.0 ? children_rate(m, p) / -e.value()
                                                          : infinity);
        }
        residual_.push_back(std::move(row));
        const double a = alpha();
        double rate = 0.0;
        if (a < 0.0) {
            const ExtendedReal e = m.exponent(-a);
            if (e.is_finite() && e.value() < 0.0) rate = -e.value();
        }
        lifetime_rate_.push_back(rate);
    }
    for (double p : exponents_) small_moment_.push_back(models_[0].small_fragment_moment(p));
}

const PathModel& TreeModels::model(ExponentKind kind) const { return models_[kind_index(kind)]; }

double TreeModels::residual_factor(ExponentKind kind, std::size_t i) const {
    return residual_[kind_index(kind)][i];
}

double TreeModels::small_fragment_moment(std::size_t i) const { return small_moment_[i]; }

double TreeModels::lifetime_tail_rate(ExponentKind kind) const {
    return lifetime_rate_[kind_index(kind)];
}

namespace {

struct PendingCell {
    UlamLabel label;
    int generation = 0;
    double birth_time = 0.0;
    double mass = 0.0;
};

struct Child {
    double mass;
    double time;
};

// Simulates one cell and collects what the tree needs from it.
struct CellRun {
    const TreeModels& models;
    const PathModel& model;
    ExponentKind kind;
    double mass;
    double birth_time;
    double log_floor;
    double clock;
    double neg_alpha;
    bool is_eve;
    const TreeOptions& options;
    Rng* watch_rng;

    std::vector<double> powers;     // mass^p
    std::vector<double> small_sums;  // Σ c_p mass^p ∫ e^{pξ}
    std::vector<Child> children;
    std::vector<double> knot_times;
    std::vector<double> knot_values;
    std::vector<TrajectoryJump> jumps;

    double integral = 0.0;  // ∫ e^{-αξ}
    double level = 0.0;
    bool floor_stop = false;
    bool horizon_stop = false;
    bool passage_stop = false;
    bool passed_watch = false;
    double first_swap_mass = 0.0;

    double real_time() const { return birth_time + clock * integral; }

    void record_knot() {
        if (!options.keep_trajectories) return;
        knot_times.push_back(real_time());
        knot_values.push_back(mass * std::exp(level));
    }

    bool crosses(double x0, double x1, double h, double target) {
        if (x1 >= target) return true;
        return watch_rng->uniform() < bridge_crossing_probability(x0, x1, h, model.gaussian_variance(), target);
    }

    void accumulate(double h, double x0, double x1) {
        const double v = model.gaussian_variance();
        const auto& exps = models.exponents();
        for (std::size_t i = 0; i < exps.size(); ++i) {
            small_sums[i] += models.small_fragment_moment(i) * powers[i] *
                             bridge_exponential_integral(x0, x1, h, exps[i], v);
        }
        integral += bridge_exponential_integral(x0, x1, h, neg_alpha, v);
    }

    // Accumulates the stretch, walking the bridge in short steps near
    // `target` so that nothing after the first passage is counted. Returns
    // whether the passage happened.
    bool accumulate_until_passage(double t0, double t1, double x0, double x1, double target) {
        constexpr int steps = 256;
        const double v = model.gaussian_variance();
        if (x1 < target && bridge_crossing_probability(x0, x1, t1 - t0, v, target) < 1e-12) {
            accumulate(t1 - t0, x0, x1);
            return false;
        }
        struct Piece {
            double h, a, b;
        };
        std::vector<Piece> pieces;
        double t = t0, x = x0;
        for (int k = 1; k <= steps; ++k) {
            const double tk = k == steps ? t1 : t0 + (t1 - t0) * k / steps;
            double xk = x1;
            if (k < steps) {
                const double frac = (tk - t) / (t1 - t);
                xk = x + frac * (x1 - x) + std::sqrt(v * (tk - t) * (1.0 - frac)) * watch_rng->normal();
            }
            const bool passed = crosses(x, xk, tk - t, target);
            if (!passed) pieces.push_back({tk - t, x, xk});
            if (passed || k == steps) {
                for (const Piece& p : pieces) accumulate(p.h, p.a, p.b);
                return passed;
            }
            t = tk;
            x = xk;
        }
        return false;
    }

    bool segment(double t0, double t1, double x0, double x1) {
        const double h = t1 - t0;
        if (is_eve && options.eve_stop.kind == EveStop::Kind::PassageAbove) {
            if (accumulate_until_passage(t0, t1, x0, x1, options.eve_stop.value)) {
                passage_stop = true;
                return false;
            }
        } else {
            accumulate(h, x0, x1);
        }
        level = x1;
        record_knot();
        if (is_eve) {
            if (options.watch_level && !passed_watch && crosses(x0, x1, h, *options.watch_level)) {
                passed_watch = true;
            }
            if (options.eve_stop.kind == EveStop::Kind::LampertiHorizon &&
                real_time() >= options.eve_stop.value) {
                horizon_stop = true;
                return false;
            }
        }
        if (level < log_floor) {
            floor_stop = true;
            return false;
        }
        return true;
    }

    bool jump(const PathJump& j) {
        const double child = mass * std::exp(j.level_before) * j.child_fraction;
        children.push_back({child, real_time()});
        if (options.keep_trajectories) {
            jumps.push_back({real_time(), mass * std::exp(j.level_before) * std::expm1(j.size)});
        }
        level = j.level_before + j.size;
        if (options.keep_trajectories) {
            knot_times.push_back(real_time());
            knot_values.push_back(mass * std::exp(level));
        }
        if (is_eve && j.kind == JumpKind::Swap && first_swap_mass == 0.0) {
            first_swap_mass = mass * std::exp(level);
            if (options.eve_stop.kind == EveStop::Kind::FirstSwap) {
                horizon_stop = true;
                return false;
            }
        }
        if (level < log_floor) {
            floor_stop = true;
            return false;
        }
        return true;
    }
};

void ensure_generation(CellTree& tree, std::size_t g) {
    for (auto* table : {&tree.retained, &tree.dropped}) {
        for (auto& row : *table) {
            if (row.size() <= g) row.resize(g + 1, 0.0);
        }
    }
    if (tree.birth_masses.size() <= g) tree.birth_masses.resize(g + 1);
}

void add_dropped(CellTree& tree, std::size_t g, double mass, double factor_scale,
                 const std::vector<double>& factors) {
    ensure_generation(tree, g);
    for (std::size_t i = 0; i < tree.exponents.size(); ++i) {
        tree.dropped[i][g] += factor_scale * factors[i] * std::pow(mass, tree.exponents[i]);
    }
}

}  // namespace

CellTree sample_cell_system(const TreeModels& models, const TreeOptions& options, Rng& rng) {
    options.policy.check();
    if (!(options.x > 0.0)) throw std::invalid_argument("sample_cell_system: x must be positive");
    if (options.law == TreeLaw::QPlus && options.eve_stop.kind == EveStop::Kind::Natural) {
        throw std::invalid_argument(
            "sample_cell_system: Q+ trees need a Lamperti horizon, a passage level or a first-swap stop");
    }
    if (options.law != TreeLaw::QPlus && options.eve_stop.kind == EveStop::Kind::FirstSwap) {
        throw std::invalid_argument("sample_cell_system: only Q+ Eve cells swap");
    }
    const std::size_t ne = models.exponents().size();
    CellTree tree;
    tree.law = options.law;
    tree.x = options.x;
    tree.policy = options.policy;
    tree.mass_floor = options.policy.mass_floor * options.x;
    tree.exponents = models.exponents();
    tree.retained.assign(ne, {});
    tree.dropped.assign(ne, {});
    tree.pruned_births.assign(ne, 0.0);
    ensure_generation(tree, 1);

    Rng watch_rng(rng.bits64());
    const std::vector<double> ones(ne, 1.0);
    const double alpha = models.alpha();
    const PathConfig& path = models.path_config();

    std::deque<PendingCell> queue;
    queue.push_back({{}, 0, 0.0, options.x});
    bool first = true;
    while (!queue.empty()) {
        PendingCell cell = std::move(queue.front());
        queue.pop_front();
        const auto g = static_cast<std::size_t>(cell.generation);
        ensure_generation(tree, g + 1);
        for (std::size_t i = 0; i < ne; ++i) tree.retained[i][g] += std::pow(cell.mass, tree.exponents[i]);
        if (static_cast<int>(g) <= options.keep_birth_generations) tree.birth_masses[g].push_back(cell.mass);
        tree.depth = std::max(tree.depth, cell.generation);

        if (tree.cell_count >= options.policy.max_cells) {
            // Budget exhausted: the cell is born but not simulated; its
            // future children enter at their expected value.
            tree.partial = true;
            std::vector<double> factors(ne);
            for (std::size_t i = 0; i < ne; ++i) factors[i] = models.residual_factor(ExponentKind::Psi, i);
            add_dropped(tree, g + 1, cell.mass, 1.0, factors);
            continue;
        }
        ++tree.cell_count;

        const bool is_eve = first;
        first = false;
        ExponentKind kind = ExponentKind::Psi;
        if (is_eve && options.law == TreeLaw::QMinus) kind = ExponentKind::PhiMinus;
        if (is_eve && options.law == TreeLaw::QPlus) kind = ExponentKind::PhiPlus;
        const PathModel& model = models.model(kind);

        CellRun run{models,     model,  kind,          cell.mass,      cell.birth_time,
                    kind == ExponentKind::PhiPlus ? -infinity : std::log(tree.mass_floor / cell.mass),
                    std::pow(cell.mass, -alpha),
                    -alpha,     is_eve, options,       &watch_rng,     {}, {}, {}, {}, {}, {}};
        run.powers.resize(ne);
        run.small_sums.assign(ne, 0.0);
        for (std::size_t i = 0; i < ne; ++i) run.powers[i] = std::pow(cell.mass, tree.exponents[i]);
        run.record_knot();
        run_path(model, options.policy.max_levy_time, path.time_step, rng, run);

        // Fragments below the jump cutoff enter the next generation.
        ensure_generation(tree, g + 1);
        for (std::size_t i = 0; i < ne; ++i) tree.dropped[i][g + 1] += run.small_sums[i];

        // Running out of Lévy time is a truncation only when the future
        // children have no finite expectation to stand in for them.
        const bool ran_out = !run.floor_stop && !run.horizon_stop && !run.passage_stop;
        if (ran_out && !std::isfinite(models.residual_factor(kind, 0))) run.horizon_stop = true;
        const bool truncated = run.horizon_stop || run.passage_stop;
        double lifetime = infinity;
        if (!truncated) {
            const double end_mass = cell.mass * std::exp(run.level);
            std::vector<double> factors(ne);
            for (std::size_t i = 0; i < ne; ++i) factors[i] = models.residual_factor(kind, i);
            add_dropped(tree, g + 1, end_mass, 1.0, factors);
            const double rate = models.lifetime_tail_rate(kind);
            if (rate > 0.0) {
                lifetime = run.clock * (run.integral + std::exp(-alpha * run.level) / rate);
            }
        }
        if (is_eve) {
            tree.eve_lifetime = lifetime;
            tree.eve_truncated = run.horizon_stop;
            tree.eve_passed_level = run.passed_watch || run.passage_stop;
            tree.eve_first_swap_mass = run.first_swap_mass;
        }

        std::sort(run.children.begin(), run.children.end(),
                  [](const Child& a, const Child& b) { return a.mass > b.mass; });
        const bool capped = cell.generation + 1 > options.policy.max_generation;
        for (std::size_t c = 0; c < run.children.size(); ++c) {
            const Child& child = run.children[c];
            if (child.mass < tree.mass_floor || capped) {
                add_dropped(tree, g + 1, child.mass, 1.0, ones);
                if (capped && child.mass >= tree.mass_floor) {
                    tree.generation_capped = true;
                } else {
                    for (std::size_t i = 0; i < ne; ++i) {
                        tree.pruned_births[i] += std::pow(child.mass, tree.exponents[i]);
                    }
                }
                continue;
            }
            PendingCell next;
            next.label = cell.label;
            next.label.push_back(static_cast<std::uint32_t>(c + 1));
            next.generation = cell.generation + 1;
            next.birth_time = child.time;
            next.mass = child.mass;
            queue.push_back(std::move(next));
        }

        if (options.keep_records) {
            CellRecord rec;
            rec.label = cell.label;
            rec.generation = cell.generation;
            rec.birth_time = cell.birth_time;
            rec.lifetime = lifetime;
            rec.birth_mass = cell.mass;
            for (const Child& child : run.children) {
                rec.child_birth_sizes.push_back(child.mass);
                rec.child_birth_times.push_back(child.time);
            }
            if (options.keep_trajectories) {
                SsmpTrajectory w;
                w.initial_mass = cell.mass;
                w.grid_times = std::move(run.knot_times);
                for (double& t : w.grid_times) t -= cell.birth_time;
                w.values = std::move(run.knot_values);
                w.jumps = std::move(run.jumps);
                for (TrajectoryJump& j : w.jumps) j.time -= cell.birth_time;
                w.lifetime = lifetime;
                rec.trajectory = std::move(w);
            }
            tree.records.push_back(std::move(rec));
        }
    }
    for (auto& masses : tree.birth_masses) std::sort(masses.begin(), masses.end(), std::greater<>());
    return tree;
}

double CellTree::power_sum(std::size_t i, int n) const {
    const auto top = static_cast<std::size_t>(n + 1);
    double total = top < retained[i].size() ? retained[i][top] : 0.0;
    for (std::size_t g = 0; g <= top && g < dropped[i].size(); ++g) total += dropped[i][g];
    return total;
}

double CellTree::dropped_total(std::size_t i) const {
    return std::accumulate(dropped[i].begin(), dropped[i].end(), 0.0);
}

GenerationMeasure generation_measure(const CellTree& tree, int n) {
    if (n < 0) throw std::invalid_argument("generation_measure: n must be nonnegative");
    const auto top = static_cast<std::size_t>(n + 1);
    GenerationMeasure out;
    if (top < tree.birth_masses.size()) out.masses = tree.birth_masses[top];
    for (std::size_t g = 0; g <= top && g < tree.dropped[0].size(); ++g) {
        out.dropped_power_sum += tree.dropped[0][g];
    }
    return out;
}

MartingalePair intrinsic_martingales(const CellTree& tree, int n) {
    MartingalePair out;
    out.minus = tree.power_sum(0, n);
    out.plus = tree.power_sum(1, n);
    const auto top = static_cast<std::size_t>(n + 1);
    for (std::size_t g = 0; g <= top && g < tree.dropped[1].size(); ++g) out.plus_dropped += tree.dropped[1][g];
    return out;
}

AreaEstimate estimate_area(const CellTree& tree) {
    AreaEstimate out;
    out.area = tree.dropped_total(0);
    out.truncation_bound = tree.pruned_births[0];
    out.partial = tree.partial;
    return out;
}

CellTree rescale_tree(const CellTree& tree, double b, double alpha) {
    if (!(b > 0.0)) throw std::invalid_argument("rescale_tree: b must be positive");
    const double stretch = std::pow(b, -alpha);
    CellTree out = tree;
    out.x *= b;
    out.mass_floor *= b;
    for (std::size_t i = 0; i < out.exponents.size(); ++i) {
        const double f = std::pow(b, out.exponents[i]);
        for (double& v : out.retained[i]) v *= f;
        for (double& v : out.dropped[i]) v *= f;
        out.pruned_births[i] *= f;
    }
    for (auto& gen : out.birth_masses) {
        for (double& m : gen) m *= b;
    }
    for (CellRecord& rec : out.records) {
        rec.birth_time *= stretch;
        rec.lifetime *= stretch;
        rec.birth_mass *= b;
        for (double& m : rec.child_birth_sizes) m *= b;
        for (double& t : rec.child_birth_times) t *= stretch;
        if (rec.trajectory) *rec.trajectory = rescale_trajectory(*rec.trajectory, b, alpha);
    }
    out.eve_lifetime *= stretch;
    out.eve_first_swap_mass *= b;
    return out;
}

}  // namespace gfrag
