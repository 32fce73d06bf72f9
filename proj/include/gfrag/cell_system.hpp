#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gfrag/levy_model.hpp"
#include "gfrag/path_sim.hpp"

namespace gfrag {

struct TrajectoryJump {
    double time = 0.0;
    // ΔX < 0.
    double size = 0.0;
};

// Self-similar Markov trajectory obtained from a Lévy skeleton by the
// Lamperti time change t = x0^{-α} ∫_0^r e^{-α ξ(s)} ds.
struct SsmpTrajectory {
    std::vector<double> grid_times;
    std::vector<double> values;
    std::vector<TrajectoryJump> jumps;
    double lifetime = std::numeric_limits<double>::infinity();
    double initial_mass = 1.0;

    // Right-continuous value at time t (0 after the lifetime), interpolating
    // linearly between knots.
    double value_at(double t) const;
};

// `model` supplies the exponent used to extrapolate ∫ e^{-αξ} beyond the
// simulated horizon; the lifetime is +inf unless α < 0 and that exponent is
// negative at -α.
SsmpTrajectory lamperti_transform(const SkeletonPath& path, const PathModel& model, double alpha,
                                  double x0);

// t ↦ b·w(b^α t).
SsmpTrajectory rescale_trajectory(const SsmpTrajectory& w, double b, double alpha);

enum class TreeLaw { P, QMinus, QPlus };

const char* tree_law_name(TreeLaw law);

struct TruncationPolicy {
    // Cells born below mass_floor·x are not simulated.
    double mass_floor = 1e-3;
    int max_generation = 8;
    std::int64_t max_cells = 100000;
    // Lévy-time guard for a single cell; reaching it stops the cell like the floor does.
    double max_levy_time = 1000.0;

    void check() const;
};

// Where the Eve cell's simulation ends.
struct EveStop {
    enum class Kind { Natural, LampertiHorizon, PassageAbove, FirstSwap };
    Kind kind = Kind::Natural;
    // LampertiHorizon: absolute time T. PassageAbove: level of log(mass/x).
    // FirstSwap (Q⁺ only): the Eve stops right after its first swap jump.
    double value = 0.0;
};

// Everything needed to grow trees, derived once from a cumulant profile.
class TreeModels {
public:
    TreeModels(const CumulantProfile& profile, const PathConfig& path);

    const CumulantProfile& profile() const noexcept { return profile_; }
    const PathConfig& path_config() const noexcept { return path_; }
    const PathModel& model(ExponentKind kind) const;
    double alpha() const noexcept { return profile_.triplet().alpha; }

    // Exponents whose generation power sums are tracked: ω₋, ω₊, (ω₋+ω₊)/2.
    const std::vector<double>& exponents() const noexcept { return exponents_; }
    // Expected Σ (child mass)^p over all future children of a cell of unit
    // mass following `kind`; +inf when that expectation diverges.
    double residual_factor(ExponentKind kind, std::size_t exponent_index) const;
    // ∫_0^{u_ε} u^p ν(du) for each tracked exponent.
    double small_fragment_moment(std::size_t exponent_index) const;
    // -(exponent at -α) of the Ψ model, used to close lifetime integrals.
    double lifetime_tail_rate(ExponentKind kind) const;

private:
    CumulantProfile profile_;
    PathConfig path_;
    std::vector<PathModel> models_;
    std::vector<double> exponents_;
    std::vector<std::vector<double>> residual_;
    std::vector<double> small_moment_;
    std::vector<double> lifetime_rate_;
};

using UlamLabel = std::vector<std::uint32_t>;

struct CellRecord {
    UlamLabel label;
    int generation = 0;
    double birth_time = 0.0;
    double lifetime = std::numeric_limits<double>::infinity();
    double birth_mass = 0.0;
    // Birth masses of all explicit children (retained or pruned), nonincreasing.
    std::vector<double> child_birth_sizes;
    // Birth times of the same children.
    std::vector<double> child_birth_times;
    std::optional<SsmpTrajectory> trajectory;

    double death_time() const { return birth_time + lifetime; }
};

struct TreeOptions {
    TreeLaw law = TreeLaw::P;
    double x = 1.0;
    TruncationPolicy policy;
    EveStop eve_stop;
    // Track whether the Eve's path ever exceeds this log-level (no effect on growth).
    std::optional<double> watch_level;
    bool keep_records = false;
    bool keep_trajectories = false;
    // Retained birth masses are kept for generations 1..keep_birth_generations.
    int keep_birth_generations = 4;
};

struct CellTree {
    TreeLaw law = TreeLaw::P;
    double x = 1.0;
    double mass_floor = 0.0;
    TruncationPolicy policy;
    std::vector<double> exponents;
    // [exponent][generation]: Σ birth_mass^p over simulated cells.
    std::vector<std::vector<double>> retained;
    // [exponent][generation]: conditional-expectation contributions entering
    // at that generation (pruned births, fragments below the jump cutoff,
    // future children of cells stopped below the mass floor).
    std::vector<std::vector<double>> dropped;
    // [exponent]: the part of `dropped` coming from explicit births below the floor.
    std::vector<double> pruned_births;
    // [generation]: retained birth masses, nonincreasing (generation 0 = {x}).
    std::vector<std::vector<double>> birth_masses;
    std::vector<CellRecord> records;

    std::int64_t cell_count = 0;
    int depth = 0;
    bool partial = false;
    bool generation_capped = false;
    bool eve_truncated = false;
    double eve_lifetime = std::numeric_limits<double>::infinity();
    bool eve_passed_level = false;
    // (mass of the tracked Eve cell right after its first swap jump, or 0)
    double eve_first_swap_mass = 0.0;

    std::size_t generation_count() const { return retained.empty() ? 0 : retained[0].size(); }
    // Σ_{|u|=n+1} X_u(0)^p with dropped contributions up to generation n+1.
    double power_sum(std::size_t exponent_index, int n) const;
    // Total dropped contribution for an exponent.
    double dropped_total(std::size_t exponent_index) const;
};

CellTree sample_cell_system(const TreeModels& models, const TreeOptions& options, Rng& rng);

// Retained masses at generation n+1 (nonincreasing) plus the dropped ω₋
// contribution through generation n+1.
struct GenerationMeasure {
    std::vector<double> masses;
    double dropped_power_sum = 0.0;
};
GenerationMeasure generation_measure(const CellTree& tree, int n);

struct MartingalePair {
    double minus = 0.0;
    double plus = 0.0;
    // Part of `plus` coming from dropped contributions.
    double plus_dropped = 0.0;
};
MartingalePair intrinsic_martingales(const CellTree& tree, int n);

struct AreaEstimate {
    double area = 0.0;
    double truncation_bound = 0.0;
    bool partial = false;
};
AreaEstimate estimate_area(const CellTree& tree);

// Scaling map on a tree: masses × b, times × b^{-α}.
CellTree rescale_tree(const CellTree& tree, double b, double alpha);

}  // namespace gfrag
