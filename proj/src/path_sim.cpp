#include "gfrag/path_sim.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>

#include "gfrag/quadrature.hpp"

namespace gfrag {

const char* exponent_name(ExponentKind kind) {
    switch (kind) {
        case ExponentKind::Psi: return "psi";
        case ExponentKind::PhiMinus: return "phi_minus";
        case ExponentKind::PhiPlus: return "phi_plus";
    }
    return "unknown";
}

void PathConfig::check() const {
    if (!(small_jump_cutoff < 0.0) || !std::isfinite(small_jump_cutoff)) {
        throw std::invalid_argument("path config: small_jump_cutoff must be a finite negative number");
    }
    if (!(time_step > 0.0) || !std::isfinite(time_step)) {
        throw std::invalid_argument("path config: time_step must be positive");
    }
    if (!(horizon > 0.0)) throw std::invalid_argument("path config: horizon must be positive");
}

namespace {

constexpr QuadratureOptions model_quadrature{1e-13, 1e-300, 4000};

// ∫_{u_cut}^1 ((1-u)^q - 1) (1-u)^w ν(du)
double large_jump_integral(const JumpMeasure& jumps, double cut, double q, double w) {
    if (jumps.is_null()) return 0.0;
    auto f = [&](double u) {
        const double keep = std::log1p(-u);
        return std::expm1(q * keep) * std::exp(w * keep) * jumps.density_u(u);
    };
    return integrate(f, cut, 1.0, model_quadrature).value;
}

// ∫_{u_cut}^1 (1-u)^w ν(du)
double large_jump_rate(const JumpMeasure& jumps, double cut, double w) {
    if (jumps.is_null()) return 0.0;
    if (w == 0.0) return jumps.tail_u(cut);
    auto f = [&](double u) { return std::exp(w * std::log1p(-u)) * jumps.density_u(u); };
    return integrate(f, cut, 1.0, model_quadrature).value;
}

double full_moment(const JumpMeasure& jumps, double q) {
    if (jumps.is_null()) return 0.0;
    if (auto closed = jumps.closed_form_moment(q)) return *closed;
    return jumps.partial_moment(q, 0.0, 1.0);
}

void check_cutoff(const JumpMeasure& jumps, double cutoff_u) {
    if (!(cutoff_u > 0.0 && cutoff_u < 1.0)) {
        throw std::invalid_argument("path model: cutoff must satisfy 0 < u_cut < 1");
    }
    if (!jumps.is_null() && !std::isfinite(jumps.tail_u(cutoff_u))) {
        throw std::invalid_argument("path model: infinite large-jump rate at this cutoff");
    }
}

}  // namespace

PathModel PathModel::build_matched(const LevyTriplet& triplet, double cutoff_u, double q1,
                                   double q2) {
    triplet.check();
    check_cutoff(*triplet.jumps, cutoff_u);
    PathModel m;
    m.kind_ = ExponentKind::Psi;
    m.cutoff_u_ = cutoff_u;
    m.jumps_ = triplet.jumps;
    if (triplet.jumps->is_null()) {
        m.variance_ = triplet.sigma2;
        m.drift_ = triplet.drift;
    } else {
        if (!(q1 > 0.0 && q2 > q1)) {
            throw std::invalid_argument("path model: matching exponents must satisfy 0 < q1 < q2");
        }
        const double r1 = laplace_exponent(triplet, q1) - large_jump_integral(*m.jumps_, cutoff_u, q1, 0.0);
        const double r2 = laplace_exponent(triplet, q2) - large_jump_integral(*m.jumps_, cutoff_u, q2, 0.0);
        m.variance_ = 2.0 * (r2 / q2 - r1 / q1) / (q2 - q1);
        m.drift_ = r1 / q1 - 0.5 * m.variance_ * q1;
        if (!(m.variance_ >= 0.0)) {
            std::ostringstream msg;
            msg << "path model: moment matching needs a negative Gaussian variance (" << m.variance_
                << "); use a smaller cutoff";
            throw std::invalid_argument(msg.str());
        }
        m.loss_rate_ = large_jump_rate(*m.jumps_, cutoff_u, 0.0);
    }
    m.compensator_drift_ = m.drift_ - triplet.drift;
    return m;
}

PathModel PathModel::build(const CumulantProfile& profile, ExponentKind kind, double cutoff_u) {
    PathModel m = build_matched(profile.triplet(), cutoff_u, profile.omega_minus(), profile.omega_plus());
    if (kind == ExponentKind::Psi) return m;
    const double w = kind == ExponentKind::PhiMinus ? profile.omega_minus() : profile.omega_plus();
    m.kind_ = kind;
    m.tilt_ = w;
    m.drift_ += m.variance_ * w;
    m.compensator_drift_ = m.drift_ - profile.triplet().drift;
    m.loss_rate_ = large_jump_rate(*m.jumps_, cutoff_u, w);
    m.swap_rate_ = full_moment(*m.jumps_, w);
    return m;
}

ExtendedReal PathModel::exponent(double q) const {
    double value = 0.5 * variance_ * q * q + drift_ * q;
    if (jumps_->is_null()) return value;
    value += large_jump_integral(*jumps_, cutoff_u_, q, tilt_);
    if (kind_ != ExponentKind::Psi) {
        const double shifted = full_moment(*jumps_, q + tilt_);
        if (!std::isfinite(shifted)) return ExtendedReal::infinity();
        value += shifted - swap_rate_;
    }
    return value;
}

double PathModel::small_fragment_moment(double p) const {
    if (jumps_->is_null()) return 0.0;
    return jumps_->partial_moment(p, 0.0, cutoff_u_);
}

PathModel::DrawnJump PathModel::draw_jump(Rng& rng) const {
    if (rng.uniform() * jump_rate() < loss_rate_) {
        for (;;) {
            const double u = jumps_->sample_above(cutoff_u_, rng);
            if (tilt_ == 0.0 || rng.uniform() < std::exp(tilt_ * std::log1p(-u))) {
                return {JumpKind::Loss, u};
            }
        }
    }
    return {JumpKind::Swap, jumps_->sample_moment_weighted(tilt_, rng)};
}

namespace {

// 5-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 5> gl_nodes = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
constexpr std::array<double, 5> gl_weights = {0.2369268850561891, 0.4786286704993665,
                                              0.5688888888888889, 0.4786286704993665,
                                              0.2369268850561891};

// ∫_0^s exp(p(a + (b-a)r/h) + p²v r(h-r)/(2h)) dr for 0 <= s <= h.
double bridge_integral_partial(double a, double b, double h, double p, double v, double s) {
    if (s <= 0.0 || h <= 0.0) return 0.0;
    const double half = 0.5 * s;
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double r = half * (1.0 + gl_nodes[i]);
        sum += gl_weights[i] * std::exp(p * (a + (b - a) * r / h) + 0.5 * p * p * v * r * (h - r) / h);
    }
    return sum * half;
}

}  // namespace

double bridge_exponential_integral(double a, double b, double h, double p, double v) {
    return bridge_integral_partial(a, b, h, p, v, h);
}

double bridge_crossing_probability(double a, double b, double h, double v, double level) {
    if (a >= level || b >= level) return 1.0;
    if (v <= 0.0 || h <= 0.0) return 0.0;
    return std::exp(-2.0 * (level - a) * (level - b) / (v * h));
}

double SkeletonPath::value_before_knot(std::size_t k) const {
    if (jump_at[k] >= 0) return jumps[static_cast<std::size_t>(jump_at[k])].level_before;
    return values[k];
}

namespace {

struct Recorder {
    SkeletonPath* path;
    bool segment(double, double t1, double, double x1) {
        path->grid_times.push_back(t1);
        path->values.push_back(x1);
        path->jump_at.push_back(-1);
        return true;
    }
    bool jump(const PathJump& j) {
        // The knot at the jump time was just written by segment(); turn it
        // into a jump knot carrying the post-jump value.
        path->jumps.push_back(j);
        path->values.back() = j.level_before + j.size;
        path->jump_at.back() = static_cast<int>(path->jumps.size() - 1);
        return true;
    }
};

}  // namespace

SkeletonPath simulate_levy_path(const PathModel& model, const PathConfig& config, Rng& rng) {
    config.check();
    SkeletonPath path;
    path.kind = model.kind();
    path.compensator_drift = model.compensator_drift();
    path.gaussian_variance = model.gaussian_variance();
    path.grid_times.push_back(0.0);
    path.values.push_back(0.0);
    path.jump_at.push_back(-1);
    Recorder recorder{&path};
    run_path(model, config.horizon, config.time_step, rng, recorder);
    return path;
}

std::vector<double> jump_weight_multiset(const SkeletonPath& path, double omega, double stop_time) {
    std::vector<double> weights;
    weights.reserve(path.jumps.size());
    for (const PathJump& j : path.jumps) {
        if (!(j.time < stop_time)) continue;
        weights.push_back(std::exp(omega * (j.level_before + std::log(j.child_fraction))));
    }
    std::sort(weights.begin(), weights.end(), std::greater<>());
    return weights;
}

double exponential_functional(const SkeletonPath& path, double p, double until) {
    double total = 0.0;
    for (std::size_t k = 1; k < path.grid_times.size(); ++k) {
        const double t0 = path.grid_times[k - 1];
        const double t1 = path.grid_times[k];
        if (t0 >= until) break;
        const double a = path.values[k - 1];
        const double b = path.value_before_knot(k);
        const double s = std::min(t1, until) - t0;
        total += bridge_integral_partial(a, b, t1 - t0, p, path.gaussian_variance, s);
    }
    return total;
}

PassageRule PassageRule::for_profile(const CumulantProfile& profile) {
    PassageRule rule;
    rule.drawdown = std::log(1e4) / profile.omega_delta();
    return rule;
}

namespace {

// First time a Brownian bridge from x0 to x1 over [t0, t0 + h] reaches
// `level`, or +inf. Midpoints are drawn from the exact bridge law and the
// earlier half is searched first, so the result is resolved to h / 2^depth.
double bridge_passage_time(double t0, double h, double x0, double x1, double variance, double level, Rng& rng,
                           int depth) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (x0 >= level) return t0;
    if (x1 < level) {
        const double p = bridge_crossing_probability(x0, x1, h, variance, level);
        if (depth == 0) return rng.uniform() < p ? t0 + 0.5 * h : inf;
        if (p < 1e-14) return inf;
    } else if (depth == 0) {
        return t0 + std::clamp((level - x0) / (x1 - x0), 0.0, 1.0) * h;
    }
    const double half = 0.5 * h;
    const double mid = 0.5 * (x0 + x1) + std::sqrt(variance * h) * 0.5 * rng.normal();
    const double first = bridge_passage_time(t0, half, x0, mid, variance, level, rng, depth - 1);
    if (first < inf) return first;
    return bridge_passage_time(t0 + half, half, mid, x1, variance, level, rng, depth - 1);
}

struct PassageWatcher {
    double level;
    PassageRule rule;
    double variance;
    Rng* rng;
    FirstPassage result;
    double running_max = 0.0;
    double max_time = 0.0;

    bool stalled(double t, double x) const {
        return running_max - x >= rule.drawdown && t - max_time >= rule.window;
    }

    bool segment(double t0, double t1, double x0, double x1) {
        const double t = bridge_passage_time(t0, t1 - t0, x0, x1, variance, level, *rng, 16);
        if (t < std::numeric_limits<double>::infinity()) {
            result = {PassageStatus::Finite, t, level};
            return false;
        }
        if (x1 > running_max) {
            running_max = x1;
            max_time = t1;
        }
        if (rule.drawdown > 0.0 && stalled(t1, x1)) {
            result = {PassageStatus::Infinite, std::numeric_limits<double>::infinity(), x1};
            return false;
        }
        return true;
    }

    bool jump(const PathJump& j) {
        const double x = j.level_before + j.size;
        if (rule.drawdown > 0.0 && stalled(j.time, x)) {
            result = {PassageStatus::Infinite, std::numeric_limits<double>::infinity(), x};
            return false;
        }
        return true;
    }
};

}  // namespace

FirstPassage first_passage_up(const PathModel& model, double level, const PathConfig& config,
                              const PassageRule& rule, Rng& rng) {
    config.check();
    if (!(level > 0.0)) throw std::invalid_argument("first_passage_up: level must be positive");
    PassageWatcher watcher{level, rule, model.gaussian_variance(), &rng, {}};
    watcher.result.status = PassageStatus::HorizonReached;
    run_path(model, config.horizon, config.time_step, rng, watcher);
    return watcher.result;
}

}  // namespace gfrag
