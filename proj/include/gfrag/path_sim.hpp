#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "gfrag/levy_model.hpp"
#include "gfrag/rng.hpp"

namespace gfrag {

enum class ExponentKind { Psi, PhiMinus, PhiPlus };

const char* exponent_name(ExponentKind kind);

struct PathConfig {
    // y_ε < 0: jumps of ξ in (y_ε, 0) are replaced by drift plus a Gaussian.
    // The default keeps ~30 explicit jumps per unit time in the reference model.
    double small_jump_cutoff = std::log(0.95);
    // Grid spacing (Lévy time) between forced knots.
    double time_step = 0.05;
    // Lévy-time horizon.
    double horizon = 1.0;

    double cutoff_u() const { return -std::expm1(small_jump_cutoff); }
    // Throws std::invalid_argument when an invariant fails.
    void check() const;
};

enum class JumpKind : std::uint8_t {
    // Explicit mass loss: the cell keeps 1 - u, a fragment of relative size u detaches.
    Loss,
    // Tilted dynamics only: the tracked cell becomes the fragment u; the
    // remainder (relative size `sibling_fraction`) starts a new cell.
    Swap,
};

struct PathJump {
    double time = 0.0;
    // Δξ < 0.
    double size = 0.0;
    // ξ(t-).
    double level_before = 0.0;
    // Mass of the newly born cell relative to e^{ξ(t-)}.
    double child_fraction = 0.0;
    JumpKind kind = JumpKind::Loss;
};

// The process actually simulated for Ψ, Φ⁻ or Φ⁺: explicit jumps whose
// relative mass loss exceeds the cutoff, plus Brownian motion with drift.
// For Ψ the Gaussian variance and drift are chosen so that the simulated
// exponent equals Ψ exactly at ω₋ and ω₊; the tilted models are exact Esscher
// transforms of that process, so their Cramér structure is exact as well.
class PathModel {
public:
    static PathModel build(const CumulantProfile& profile, ExponentKind kind, double cutoff_u);
    // Brownian motion with drift plus explicit jumps above the cutoff, with the
    // Gaussian part matched to Ψ at the two given exponents (no profile needed).
    static PathModel build_matched(const LevyTriplet& triplet, double cutoff_u, double q1,
                                   double q2);

    ExponentKind kind() const noexcept { return kind_; }
    double gaussian_variance() const noexcept { return variance_; }
    double drift() const noexcept { return drift_; }
    double cutoff_u() const noexcept { return cutoff_u_; }
    double tilt() const noexcept { return tilt_; }
    double loss_rate() const noexcept { return loss_rate_; }
    double swap_rate() const noexcept { return swap_rate_; }
    double jump_rate() const noexcept { return loss_rate_ + swap_rate_; }
    // Drift adjustment relative to the triplet's d (compensation of cut jumps).
    double compensator_drift() const noexcept { return compensator_drift_; }
    const JumpMeasure& jumps() const noexcept { return *jumps_; }

    // Laplace exponent of the simulated process, by quadrature.
    ExtendedReal exponent(double q) const;
    // ∫_0^{u_ε} u^p ν(du): rate at which tiny fragments carry mass^p.
    double small_fragment_moment(double p) const;

    struct DrawnJump {
        JumpKind kind;
        double u;  // relative loss (Loss) or relative size of the new tracked cell (Swap)
    };
    DrawnJump draw_jump(Rng& rng) const;

private:
    ExponentKind kind_ = ExponentKind::Psi;
    double variance_ = 0.0;
    double drift_ = 0.0;
    double cutoff_u_ = 0.0;
    double tilt_ = 0.0;
    double loss_rate_ = 0.0;
    double swap_rate_ = 0.0;
    double compensator_drift_ = 0.0;
    JumpMeasurePtr jumps_;
};

// Receives the simulated path piece by piece. Return false from either hook to stop.
//   bool segment(double t0, double t1, double x0, double x1)  -- continuous stretch
//   bool jump(const PathJump& jump)                           -- jump at jump.time
template <class Visitor>
void run_path(const PathModel& model, double horizon, double time_step, Rng& rng,
              Visitor& visitor) {
    const double sd_rate = std::sqrt(model.gaussian_variance());
    const double rate = model.jump_rate();
    double t = 0.0;
    double x = 0.0;
    double next_jump = rate > 0.0 ? rng.exponential() / rate : std::numeric_limits<double>::infinity();
    while (t < horizon) {
        double grid = std::min(horizon, t + time_step);
        const bool jump_first = next_jump < grid;
        const double t1 = jump_first ? next_jump : grid;
        const double h = t1 - t;
        const double x1 = x + model.drift() * h + sd_rate * std::sqrt(h) * rng.normal();
        if (!visitor.segment(t, t1, x, x1)) return;
        t = t1;
        x = x1;
        if (jump_first) {
            const PathModel::DrawnJump drawn = model.draw_jump(rng);
            PathJump jump;
            jump.time = t;
            jump.level_before = x;
            jump.kind = drawn.kind;
            if (drawn.kind == JumpKind::Loss) {
                jump.size = std::log1p(-drawn.u);
                jump.child_fraction = drawn.u;
            } else {
                jump.size = std::log(drawn.u);
                jump.child_fraction = drawn.u > model.cutoff_u() ? 1.0 - drawn.u : 1.0;
            }
            x += jump.size;
            next_jump = t + rng.exponential() / rate;
            if (!visitor.jump(jump)) return;
        }
    }
}

// E[∫_0^h exp(p·B(s)) ds | B(0)=a, B(h)=b] for Brownian motion with variance
// rate v (drift is irrelevant once both endpoints are fixed).
double bridge_exponential_integral(double a, double b, double h, double p, double v);

// Probability that a Brownian bridge from a to b over time h (variance rate v)
// reaches `level` > max(a, b).
double bridge_crossing_probability(double a, double b, double h, double v, double level);

// Simulated Lévy path: knots at grid times and at jump times (value after the
// jump at a jump knot), plus the explicit jump list.
struct SkeletonPath {
    ExponentKind kind = ExponentKind::Psi;
    std::vector<double> grid_times;
    std::vector<double> values;
    // Index into `jumps` for each knot, or -1.
    std::vector<int> jump_at;
    std::vector<PathJump> jumps;
    double compensator_drift = 0.0;
    double gaussian_variance = 0.0;

    double horizon() const { return grid_times.empty() ? 0.0 : grid_times.back(); }
    // Value just before knot k, i.e. before its jump at a jump knot (k >= 1).
    double value_before_knot(std::size_t k) const;
};

SkeletonPath simulate_levy_path(const PathModel& model, const PathConfig& config, Rng& rng);

// Sorted (nonincreasing) weights (e^{ξ(t-)}·child_fraction)^ω over jumps with
// time < stop_time. For Ψ paths the child fraction is 1 - e^{Δξ}.
std::vector<double> jump_weight_multiset(const SkeletonPath& path, double omega,
                                         double stop_time = std::numeric_limits<double>::infinity());

// Conditional expectation, given the skeleton, of ∫_0^{until} e^{p ξ(s)} ds.
double exponential_functional(const SkeletonPath& path, double p,
                              double until = std::numeric_limits<double>::infinity());

enum class PassageStatus { Finite, Infinite, HorizonReached };

struct FirstPassage {
    PassageStatus status = PassageStatus::HorizonReached;
    double time = std::numeric_limits<double>::infinity();
    double crossing_value = 0.0;
};

struct PassageRule {
    // Declare Infinite once the path sits this many log-units below its running
    // maximum and the maximum is at least `window` (Lévy time) old.
    // Default K = ln(10^4)/ω_Δ caps the false-Infinite rate at 10^-4 under Φ⁻.
    double drawdown = 0.0;
    double window = 0.5;

    static PassageRule for_profile(const CumulantProfile& profile);
};

// First time the path exceeds `level` > 0. Inside a Gaussian stretch the
// crossing is located by recursive exact bridge sampling to 2^-16 of the step.
FirstPassage first_passage_up(const PathModel& model, double level, const PathConfig& config,
                              const PassageRule& rule, Rng& rng);

}  // namespace gfrag
