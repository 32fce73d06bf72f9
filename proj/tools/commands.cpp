#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "gfrag/conditioning.hpp"
#include "gfrag/density_lab.hpp"
#include "gfrag/path_sim.hpp"
#include "gfrag/stats.hpp"

namespace gfrag::cli {

namespace {

using nlohmann::json;

std::string short_number(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.4g", v);
    return buffer;
}

json mean_json(const MeanEstimate& m) { return {{"mean", m.mean}, {"std_error", m.std_error}, {"count", m.count}}; }

json comparison_json(const Comparison& c) {
    return {{"lhs", c.lhs}, {"lhs_se", c.lhs_se}, {"rhs", c.rhs}, {"rhs_se", c.rhs_se}, {"gap", c.gap},
            {"joint_se", c.joint_se}};
}

void write_comparisons(RunContext& ctx, const std::string& file, const std::vector<Comparison>& rows) {
    std::ofstream out = ctx.open_table(file, {"label", "lhs", "lhs_se", "rhs", "rhs_se", "gap", "joint_se", "passed"});
    for (const Comparison& c : rows) {
        out << c.label << '\t' << cell(c.lhs) << '\t' << cell(c.lhs_se) << '\t' << cell(c.rhs) << '\t'
            << cell(c.rhs_se) << '\t' << cell(c.gap) << '\t' << cell(c.joint_se) << '\t' << c.passed << '\n';
        ctx.check(c.label, c.passed, comparison_json(c));
    }
}

std::vector<double> capped_minus(const std::vector<CellTree>& trees, int n, double cap) {
    std::vector<double> out;
    out.reserve(trees.size());
    for (const CellTree& t : trees) out.push_back(std::min(intrinsic_martingales(t, n).minus, cap));
    return out;
}

ExponentKind parse_kind(const std::string& name) {
    if (name == "psi") return ExponentKind::Psi;
    if (name == "phi_minus") return ExponentKind::PhiMinus;
    if (name == "phi_plus") return ExponentKind::PhiPlus;
    throw ConfigError("unknown exponent '" + name + "' (expected psi, phi_minus or phi_plus)");
}

BandwidthPolicy bandwidth_policy(const RunContext& ctx) {
    BandwidthPolicy p;
    const std::string kind = ctx.text("bandwidth", "plugin");
    if (kind == "plugin") {
        p.kind = BandwidthPolicy::Kind::PlugIn;
    } else if (kind == "silverman") {
        p.kind = BandwidthPolicy::Kind::Silverman;
    } else {
        p.kind = BandwidthPolicy::Kind::Fixed;
        p.value = ctx.number("bandwidth", 0.0);
    }
    p.scale = ctx.number("bandwidth_scale", 1.0);
    return p;
}

// Ensemble from <section>.input, or sampled on stage 1 and saved as `fallback_file`.
AreaEnsemble input_or_sample(RunContext& ctx, const std::string& fallback_file) {
    if (const auto path = ctx.input_path(ctx.subcommand() + ".input")) return load_area_ensemble(*path);
    const TreeLaw law = parse_tree_law(ctx.text("law", "P"));
    AreaEnsemble e = sample_area_ensemble(ctx.models(), law, ctx.number("x", 1.0), ctx.count("count", 10000),
                                          ctx.policy(), ctx.stage_seed(1), 1, ctx.threads());
    save_area_ensemble(ctx.output_path(fallback_file), e);
    return e;
}

std::vector<double> base_quantiles(const TiltingBase& base, const std::vector<double>& ps) {
    std::vector<double> out;
    for (double p : ps) out.push_back(base.base_quantile(p));
    return out;
}

void cumulant(RunContext& ctx) {
    const CumulantProfile& p = ctx.profile();
    const double q_max = ctx.number("q_max", 5.0);
    const std::size_t points = ctx.count("points", 51);
    {
        std::ofstream out = ctx.open_table("cumulant.tsv", {"q", "psi", "kappa", "phi_minus", "phi_plus"});
        for (std::size_t i = 0; i < points; ++i) {
            const double q = points == 1 ? 0.0 : q_max * static_cast<double>(i) / static_cast<double>(points - 1);
            out << cell(q) << '\t' << cell(p.psi(q)) << '\t' << cell(p.kappa(q).value_or(INFINITY)) << '\t'
                << cell(p.phi_minus(q).value_or(INFINITY)) << '\t' << cell(p.phi_plus(q).value_or(INFINITY)) << '\n';
        }
    }
    {
        std::ofstream out(ctx.output_path("roots.txt"));
        out << "omega_minus = " << cell(p.omega_minus()) << '\n';
        out << "omega_plus = " << cell(p.omega_plus()) << '\n';
        out << "omega_delta = " << cell(p.omega_delta()) << '\n';
    }
    const double k_minus = p.kappa(p.omega_minus()).value();
    const double k_plus = p.kappa(p.omega_plus()).value();
    const double phi_delta = p.phi_minus(p.omega_delta()).value();
    ctx.check("kappa(omega-) = 0", std::abs(k_minus) <= 1e-10, {{"value", k_minus}, {"tolerance", 1e-10}});
    ctx.check("kappa(omega+) = 0", std::abs(k_plus) <= 1e-10, {{"value", k_plus}, {"tolerance", 1e-10}});
    ctx.check("Phi-(omega_delta) = 0", std::abs(phi_delta) <= 1e-10, {{"value", phi_delta}, {"tolerance", 1e-10}});
    ctx.results() = {{"omega_minus", p.omega_minus()}, {"omega_plus", p.omega_plus()}, {"omega_delta", p.omega_delta()}};
}

void validate(RunContext& ctx) {
    const ValidationReport report = validate_assumptions(ctx.triplet());
    std::ofstream out = ctx.open_table("validate.tsv", {"name", "passed", "detail"});
    for (const AssumptionCheck& c : report.checks) {
        out << c.name << '\t' << c.passed << '\t' << c.detail << '\n';
        ctx.check(c.name, c.passed, {{"detail", c.detail}});
    }
}

void simulate_paths(RunContext& ctx) {
    const ExponentKind kind = parse_kind(ctx.text("kind", "psi"));
    const std::size_t n = ctx.count("count", 100000);
    const double omega = ctx.profile().omega_minus();
    const PathModel& model = ctx.models().model(kind);
    PathConfig config = ctx.models().path_config();
    config.horizon = ctx.number("horizon", 1.0);
    config.check();
    std::vector<double> end(n), largest(n);
    std::vector<std::size_t> jumps(n);
    parallel_for(n, ctx.threads(), [&](std::size_t i) {
        Rng rng(ctx.stage_seed(1), Stream::LevyPaths, i);
        const SkeletonPath path = simulate_levy_path(model, config, rng);
        end[i] = path.values.back();
        jumps[i] = path.jumps.size();
        const auto w = jump_weight_multiset(path, omega);
        largest[i] = w.empty() ? 0.0 : w.front();
    });
    {
        std::ofstream out = ctx.open_table("paths.tsv", {"index", "terminal", "jumps", "largest_weight"},
                                           {{"kind", exponent_name(kind)}, {"horizon", cell(config.horizon)}});
        for (std::size_t i = 0; i < n; ++i) out << i << '\t' << cell(end[i]) << '\t' << jumps[i] << '\t' << cell(largest[i]) << '\n';
    }
    const CumulantProfile& p = ctx.profile();
    for (double q : ctx.numbers("q", {0.25, 0.5, 1.0})) {
        const double exponent = kind == ExponentKind::Psi        ? p.psi(q)
                                : kind == ExponentKind::PhiMinus ? p.phi_minus(q).value_or(INFINITY)
                                                                 : p.phi_plus(q).value_or(INFINITY);
        std::vector<double> e(n);
        for (std::size_t i = 0; i < n; ++i) e[i] = std::exp(q * end[i]);
        const MeanEstimate m = mean_estimate(e);
        const double target = std::exp(config.horizon * exponent);
        json detail = mean_json(m);
        detail["q"] = q;
        detail["target"] = target;
        ctx.check("E exp(q xi(t)) at q = " + short_number(q), m.within(target, 3.0), detail);
    }
}

void sample_trees(RunContext& ctx) {
    const TreeLaw law = parse_tree_law(ctx.text("law", "P"));
    const double x = ctx.number("x", 1.0);
    const auto generations = static_cast<int>(ctx.integer("generations", 3));
    const AreaEnsemble e = sample_area_ensemble(ctx.models(), law, x, ctx.count("count", 10000), ctx.policy(),
                                                ctx.stage_seed(1), generations, ctx.threads());
    save_area_ensemble(ctx.output_path("trees.tsv"), e);
    ctx.results() = {{"partial_trees", e.partial_count()}, {"count", e.size()}};
    if (law != TreeLaw::P) return;
    const double target = std::pow(x, ctx.profile().omega_minus());
    for (int n = 0; n < generations; ++n) {
        const MeanEstimate m = mean_estimate(e.minus[static_cast<std::size_t>(n)]);
        json detail = mean_json(m);
        detail["target"] = target;
        ctx.check("E M-(" + std::to_string(n) + ") = x^omega-", m.within(target, 3.0), detail);
    }
    const MeanEstimate a = mean_estimate(e.areas);
    json detail = mean_json(a);
    detail["target"] = target;
    ctx.check("E A = x^omega-", a.within(target, 3.0), detail);
}

void area_density(RunContext& ctx) {
    const AreaEnsemble e = input_or_sample(ctx, "areas.tsv");
    DensityGridOptions grid;
    grid.points = ctx.count("points", grid.points);
    const DensityEstimate est = estimate_density(e.areas, bandwidth_policy(ctx), grid);
    const DensityEstimate biased = size_biased_density(est);
    {
        std::ofstream out = ctx.open_table("density.tsv", {"r", "a_hat", "std_error", "size_biased"},
                                           {{"law", tree_law_name(e.law)},
                                            {"x", cell(e.x)},
                                            {"bandwidth", cell(est.bandwidth)},
                                            {"samples", std::to_string(est.sample_count)}});
        for (std::size_t i = 0; i < est.grid.size(); ++i) {
            out << cell(est.grid[i]) << '\t' << cell(est.values[i]) << '\t' << cell(est.std_errors[i]) << '\t'
                << cell(biased.values[i]) << '\n';
        }
    }
    const double n = static_cast<double>(e.size());
    const double integral = est.integral();
    ctx.check("density integrates to 1", std::abs(integral - 1.0) <= 3.0 / std::sqrt(n),
              {{"integral", integral}, {"tolerance", 3.0 / std::sqrt(n)}});
    const double lo = quantile(e.areas, 0.05), hi = quantile(e.areas, 0.95);
    bool positive = true;
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        if (est.grid[i] >= lo && est.grid[i] <= hi) positive = positive && est.values[i] > 0.0;
    }
    ctx.check("density positive on the central 90%", positive, {{"r_lo", lo}, {"r_hi", hi}});
    if (e.law == TreeLaw::P) {
        const double target = std::pow(e.x, ctx.profile().omega_minus());
        const MeanEstimate m = mean_estimate(e.areas);
        json detail = mean_json(m);
        detail["target"] = target;
        ctx.check("sample mean = x^omega-", m.within(target, 3.0), detail);
    }
    ctx.results() = {{"bandwidth", est.bandwidth}, {"integral", integral}, {"first_moment", est.first_moment()}};
}

void tail_fit(RunContext& ctx) {
    const auto path = ctx.input_path("tail-fit.input");
    if (!path) throw ConfigError("tail-fit needs tail-fit.input = <ensemble file from sample-trees or area-density>");
    const AreaEnsemble e = load_area_ensemble(*path);
    const CumulantProfile& p = ctx.profile();
    TailFitOptions o;
    const std::string slope = ctx.text("slope", "fit");
    const double theory = e.law == TreeLaw::P        ? p.omega_plus() / p.omega_minus()
                          : e.law == TreeLaw::QMinus ? p.omega_delta() / p.omega_minus()
                                                     : 0.0;
    if (slope == "theory") {
        if (theory == 0.0) throw ConfigError("tail-fit.slope = theory: no predicted exponent under Q+");
        o.slope = theory;
    } else if (slope != "fit") {
        o.slope = ctx.number("slope", 0.0);
    }
    if (ctx.integer("k_lo", 0) > 0) {
        o.window = std::make_pair(static_cast<std::size_t>(ctx.integer("k_lo", 0)), ctx.count("k_hi", 1));
    }
    o.plateau_sigmas = ctx.number("plateau_sigmas", o.plateau_sigmas);
    const TailFit fit = fit_tail(e.areas, o);
    {
        std::ofstream out = ctx.open_table("tail.tsv", {"k", "hill_exponent"}, {{"input", *path}});
        for (const auto& [k, h] : fit.hill_plot) out << k << '\t' << cell(h) << '\n';
    }
    ctx.results() = {{"exponent", fit.exponent},   {"exponent_se", fit.exponent_se}, {"constant", fit.constant},
                     {"constant_se", fit.constant_se}, {"slope_used", fit.slope_used}, {"fit_lo", fit.fit_lo},
                     {"fit_hi", fit.fit_hi},       {"k_lo", fit.k_lo},               {"k_hi", fit.k_hi},
                     {"law", tree_law_name(e.law)}};
    ctx.check("Hill plateau found", fit.stable);
    if (theory > 0.0) {
        ctx.check("exponent within 10% of the predicted value", std::abs(fit.exponent / theory - 1.0) <= 0.1,
                  {{"exponent", fit.exponent}, {"expected", theory}});
    }
}

void smoothing_check(RunContext& ctx) {
    const std::size_t n = ctx.count("count", 10000);
    const AreaEnsemble fresh =
        sample_area_ensemble(ctx.models(), TreeLaw::P, 1.0, n, ctx.policy(), ctx.stage_seed(1), 0, ctx.threads());
    const AreaPool pool(ctx.base().areas);
    const SmoothingReport r = smoothing_fixpoint_check(fresh.areas, ctx.models(), pool, n, ctx.stage_seed(2), ctx.threads());
    {
        std::ofstream out = ctx.open_table("smoothing.tsv", {"area", "transformed"});
        for (std::size_t i = 0; i < n; ++i) out << cell(fresh.areas[i]) << '\t' << cell(r.transformed[i]) << '\n';
    }
    const double level = ctx.number("level", 0.01);
    ctx.check("KS(A, sum gamma_i A_i)", r.ks.passes(level),
              {{"statistic", r.ks.statistic}, {"p_value", r.ks.p_value}, {"level", level}});
    json detail = mean_json(r.transform_mean);
    detail["target"] = 1.0;
    ctx.check("mean of sum gamma_i A_i = 1", r.transform_mean.within(1.0, 3.0), detail);
    ctx.results() = {{"mean_truncated_mass", r.mean_truncated_mass}};
}

void affine_check(RunContext& ctx) {
    const double level = ctx.number("level", 0.5);
    const std::size_t n = ctx.count("count", 5000);
    const AffineReport r = affine_equation_check(ctx.models(), level, n, ctx.policy(), ctx.stage_seed(1), ctx.threads());
    {
        std::ofstream out = ctx.open_table("affine.tsv", {"conditioned", "reconstructed"}, {{"level", cell(level)}});
        for (std::size_t i = 0; i < n; ++i) out << cell(r.conditioned[i]) << '\t' << cell(r.reconstructed[i]) << '\n';
    }
    const double ks_level = ctx.number("ks_level", 0.01);
    ctx.check("KS(conditioned, reconstructed)", r.ks.passes(ks_level),
              {{"statistic", r.ks.statistic}, {"p_value", r.ks.p_value}, {"level", ks_level}});
    const double z = std::abs(r.passage_probability - r.passage_probability_theory) / r.passage_probability_se;
    ctx.check("passage rate = exp(-x omega_delta)", z <= 3.0,
              {{"rate", r.passage_probability}, {"std_error", r.passage_probability_se},
               {"target", r.passage_probability_theory}});
    ctx.results() = {{"attempts", r.attempts}, {"pre_passage_area", mean_json(r.pre_passage_area)}};
}

void condition(RunContext& ctx) {
    const TiltingBase base(ctx.models(), ctx.base().areas);
    ConditioningOptions o;
    o.policy = ctx.policy();
    o.inner_samples = ctx.count("inner", o.inner_samples);
    o.resample = ctx.flag("resample", false);
    o.max_denominator_relative_error = ctx.number("max_relative_error", o.max_denominator_relative_error);
    const double x = ctx.number("x", 1.0);
    const double r = ctx.number("r", 1.0);
    const auto n = static_cast<int>(ctx.integer("generation", 1));
    const ConditionalEnsemble e =
        sample_conditioned(base, x, r, n, ctx.count("count", 1000), o, ctx.stage_seed(1), ctx.threads());
    {
        std::ofstream out = ctx.open_table("condition.tsv", {"index", "weight", "weight_se", "area", "minus_n"},
                                           {{"x", cell(x)}, {"r", cell(r)}, {"generation", std::to_string(n)}});
        for (std::size_t i = 0; i < e.samples.size(); ++i) {
            const TiltedSample& s = e.samples[i];
            out << i << '\t' << cell(s.weight) << '\t' << cell(s.weight_std_error) << '\t'
                << cell(estimate_area(s.tree).area) << '\t' << cell(intrinsic_martingales(s.tree, n).minus) << '\n';
        }
    }
    if (o.resample) {
        std::ofstream out = ctx.open_table("condition_resampled.tsv", {"index"});
        for (std::size_t i : e.resampled) out << i << '\n';
    }
    const MeanEstimate w = e.weight_mean();
    json detail = mean_json(w);
    detail["target"] = 1.0;
    ctx.check("weight mean = 1", w.within(1.0, 3.0), detail);
    ctx.results() = {{"effective_sample_size", e.effective_sample_size}, {"bandwidth", e.bandwidth}};
}

TiltedTreeSet tilted_set(RunContext& ctx, const TiltingBase& base, const std::vector<double>& r_values,
                         std::vector<int> generations) {
    TiltedSetOptions o;
    o.trees = ctx.count("trees", o.trees);
    o.inner_samples = ctx.count("inner", o.inner_samples);
    o.generations = std::move(generations);
    o.policy = ctx.policy();
    const auto grid = central_r_grid(base, ctx.count("grid_points", 401), 0.005, 0.995, r_values);
    return build_tilted_tree_set(base, grid, o, ctx.stage_seed(1), ctx.threads());
}

void disintegration(RunContext& ctx) {
    const TiltingBase base(ctx.models(), ctx.base().areas);
    const auto n = static_cast<int>(ctx.integer("generation", 1));
    const double cap = ctx.number("cap", 3.0);
    const auto r_values = base_quantiles(base, ctx.numbers("r_quantiles", {0.1, 0.3, 0.5, 0.7, 0.9}));
    const TiltedTreeSet set = tilted_set(ctx, base, r_values, {n, n + 1});
    {
        std::ofstream out = ctx.open_table("weights.tsv", {"generation", "r", "mean", "std_error", "passed"});
        for (const WeightMeanCell& c : weight_mean_grid(set, r_values)) {
            out << c.generation << '\t' << cell(c.r) << '\t' << cell(c.weight.mean) << '\t' << cell(c.weight.std_error)
                << '\t' << c.passed << '\n';
            json detail = mean_json(c.weight);
            detail["r"] = c.r;
            ctx.check("weight mean n = " + std::to_string(c.generation) + ", r = " + short_number(c.r), c.passed, detail);
        }
    }
    const std::vector<double> one(set.trees.size(), 1.0);
    const std::vector<double> g = capped_minus(set.trees, n, cap);
    std::vector<Comparison> rows;
    rows.push_back(disintegration_check(set, n, one, [](double r) { return r > 1.0 ? 1.0 : 0.0; },
                                        "disintegration G = 1, f = 1{r > 1}"));
    rows.push_back(disintegration_check(set, n, g, [](double r) { return std::exp(-r); },
                                        "disintegration G = min(M-(n), cap), f = exp(-r)"));
    for (auto& c : tower_consistency(set, n, n + 1, g, r_values)) rows.push_back(c);
    write_comparisons(ctx, "disintegration.tsv", rows);
}

void large_area(RunContext& ctx) {
    const TiltingBase base(ctx.models(), ctx.base().areas);
    const double cap = ctx.number("cap", 3.0);
    const auto r_values = base_quantiles(base, ctx.numbers("r_quantiles", {0.9, 0.95, 0.98, 0.99, 0.995}));
    const TiltedTreeSet set = tilted_set(ctx, base, r_values, {0});
    const auto spine =
        plus_tilted_eve_samples(ctx.models(), ctx.count("spine", 2000), ctx.policy(), ctx.stage_seed(2), ctx.threads());
    std::vector<double> spine_g;
    for (const SpineSample& s : spine) spine_g.push_back(std::min(s.minus_sum, cap));
    const LargeAreaReport r = large_area_limit_check(set, capped_minus(set.trees, 0, cap), r_values, spine_g);
    {
        std::ofstream out =
            ctx.open_table("large_area.tsv", {"r", "quantile", "tilted", "tilted_se", "gap", "joint_se", "l1_gap"});
        for (const LargeAreaPoint& p : r.points) {
            out << cell(p.r) << '\t' << cell(p.quantile) << '\t' << cell(p.tilted.mean) << '\t'
                << cell(p.tilted.std_error) << '\t' << cell(p.gap) << '\t' << cell(p.joint_se) << '\t'
                << cell(p.l1_gap) << '\n';
        }
    }
    ctx.check("gap at the largest r within 3 joint SE", r.passed,
              {{"gap_within", r.gap_within}, {"trend_supports", r.trend_supports}, {"inconclusive", r.inconclusive}});
    ctx.results() = {{"spine_limit", mean_json(r.spine_limit)}, {"plain_limit", mean_json(r.plain_limit)}};
}

void mixture(RunContext& ctx) {
    const TiltingBase base(ctx.models(), ctx.base().areas);
    const auto n = static_cast<int>(ctx.integer("generation", 0));
    const double cap = ctx.number("cap", 3.0);
    const double alpha = ctx.models().alpha();
    const TiltedTreeSet set = tilted_set(ctx, base, {}, {n});
    std::vector<Comparison> rows;
    rows.push_back(random_rescale_mixture_check(
        set, n,
        [&](const CellTree& t, double b) { return std::min(intrinsic_martingales(rescale_tree(t, b, alpha), n).minus, cap); },
        "mixture G = min(M-(n) of the rescaled tree, cap)"));
    write_comparisons(ctx, "mixture.tsv", rows);
}

void canonical_tail(RunContext& ctx) {
    const CumulantProfile& p = ctx.profile();
    const auto xs = ctx.numbers("x", {0.1, 0.05, 0.025});
    const auto rs = ctx.numbers("r", {0.25, 0.35, 0.5, 0.7, 1.0, 1.4, 2.0});
    const CanonicalTailReport r = canonical_tail_estimate(ctx.models(), xs, rs, ctx.count("count", 30000), ctx.policy(),
                                                          ctx.stage_seed(1), ctx.threads());
    {
        std::vector<std::string> columns = {"r"};
        for (const CanonicalCurve& c : r.curves) {
            columns.push_back("value_x" + cell(c.x));
            columns.push_back("se_x" + cell(c.x));
        }
        std::ofstream out = ctx.open_table("canonical.tsv", columns);
        for (std::size_t k = 0; k < r.r_grid.size(); ++k) {
            out << cell(r.r_grid[k]);
            for (const CanonicalCurve& c : r.curves) out << '\t' << cell(c.values[k]) << '\t' << cell(c.std_errors[k]);
            out << '\n';
        }
    }
    TailFitOptions o;
    o.slope = p.omega_plus() / p.omega_minus();
    const TailFit fit = fit_tail(ctx.base().areas, o);
    const double ratio = r.constant / fit.constant;
    ctx.check("curves stabilize across x", r.stabilized, {{"max_successive_z", r.max_successive_z}});
    ctx.check("exponent within 10% of omega_delta/omega-", r.exponent_within,
              {{"exponent", r.exponent}, {"exponent_se", r.exponent_se}, {"expected", r.expected_exponent}});
    ctx.check("constant within 25% of the tail constant", std::abs(ratio - 1.0) <= 0.25,
              {{"constant", r.constant}, {"constant_se", r.constant_se}, {"tail_constant", fit.constant},
               {"ratio", ratio}});
    ctx.results() = {{"ratio_to_tail_constant_times_omega_plus_over_omega_delta",
                      r.constant / (fit.constant * p.omega_plus() / p.omega_delta())}};
}

}  // namespace

const std::vector<Command>& commands() {
    static const std::vector<Command> all = {
        {"cumulant", "Tabulate Psi, kappa, Phi- and Phi+ and find the Cramér roots", {"q_max", "points"}, cumulant},
        {"validate", "Check the model assumptions", {}, validate},
        {"simulate-paths", "Simulate Lévy paths and check exponential moments", {"kind", "count", "horizon", "q"},
         simulate_paths},
        {"sample-trees", "Sample cell systems and write their area ensemble", {"law", "x", "count", "generations"},
         sample_trees},
        {"area-density", "Estimate the area density",
         {"input", "law", "x", "count", "bandwidth", "bandwidth_scale", "points"}, area_density},
        {"tail-fit", "Fit the power tail of an ensemble file", {"input", "slope", "k_lo", "k_hi", "plateau_sigmas"},
         tail_fit},
        {"smoothing-check", "Compare A with the smoothing transform of A", {"count", "level"}, smoothing_check},
        {"affine-check", "Check the passage decomposition of the size-biased area", {"level", "count", "ks_level"},
         affine_check},
        {"condition", "Sample a weighted ensemble conditioned on the area",
         {"x", "r", "generation", "count", "inner", "resample", "max_relative_error"}, condition},
        {"disintegration", "Weight means, disintegration and tower checks",
         {"generation", "trees", "inner", "cap", "grid_points", "r_quantiles"}, disintegration},
        {"large-area", "Conditioned means at large areas against the M+ tilt",
         {"trees", "inner", "spine", "cap", "grid_points", "r_quantiles"}, large_area},
        {"mixture", "Random-rescaling mixture identity", {"generation", "trees", "inner", "cap", "grid_points"}, mixture},
        {"canonical-tail", "Small-mass tail of the size-biased area", {"x", "r", "count"}, canonical_tail},
    };
    return all;
}

}  // namespace gfrag::cli
