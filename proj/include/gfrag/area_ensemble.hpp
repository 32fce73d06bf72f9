#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gfrag/cell_system.hpp"

namespace gfrag {

// Per-tree summaries of an ensemble grown under one law from one start mass.
struct AreaEnsemble {
    TreeLaw law = TreeLaw::P;
    double x = 1.0;
    std::uint64_t seed = 0;
    double mass_floor = 0.0;
    int max_generation = 0;
    std::vector<double> areas;
    // [generation][tree]: M⁻(n) for n = 0..minus_generations-1.
    std::vector<std::vector<double>> minus;
    std::vector<std::uint8_t> partial;

    std::size_t size() const noexcept { return areas.size(); }
    std::size_t partial_count() const;
};

// Tree i uses stream (seed, law stream, i): CellTrees for P, SpineMinusTrees
// for Q⁻, SpinePlusTrees for Q⁺.
Stream tree_stream(TreeLaw law);

AreaEnsemble sample_area_ensemble(const TreeModels& models, TreeLaw law, double x, std::size_t count,
                                  const TruncationPolicy& policy, std::uint64_t seed, int minus_generations = 3,
                                  unsigned threads = 1);

// Columnar text: '#' header lines with the metadata, then one row per tree:
// area partial minus_0 minus_1 ...
void write_area_ensemble(std::ostream& out, const AreaEnsemble& ensemble);
void save_area_ensemble(const std::string& path, const AreaEnsemble& ensemble);
// Throws ConfigError with the offending line number on malformed input.
AreaEnsemble read_area_ensemble(std::istream& in, const std::string& source = "<stream>");
AreaEnsemble load_area_ensemble(const std::string& path);

TreeLaw parse_tree_law(const std::string& name);

}  // namespace gfrag
