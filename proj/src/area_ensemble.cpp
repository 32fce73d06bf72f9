#include "gfrag/area_ensemble.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gfrag/key_value.hpp"
#include "gfrag/stats.hpp"

namespace gfrag {

std::size_t AreaEnsemble::partial_count() const {
    return static_cast<std::size_t>(std::count(partial.begin(), partial.end(), std::uint8_t{1}));
}

Stream tree_stream(TreeLaw law) {
    switch (law) {
        case TreeLaw::P: return Stream::CellTrees;
        case TreeLaw::QMinus: return Stream::SpineMinusTrees;
        case TreeLaw::QPlus: return Stream::SpinePlusTrees;
    }
    return Stream::CellTrees;
}

TreeLaw parse_tree_law(const std::string& name) {
    if (name == "P") return TreeLaw::P;
    if (name == "Q-") return TreeLaw::QMinus;
    if (name == "Q+") return TreeLaw::QPlus;
    throw ConfigError("unknown tree law '" + name + "' (expected P, Q- or Q+)");
}

AreaEnsemble sample_area_ensemble(const TreeModels& models, TreeLaw law, double x, std::size_t count,
                                  const TruncationPolicy& policy, std::uint64_t seed, int minus_generations,
                                  unsigned threads) {
    if (minus_generations < 0) throw std::invalid_argument("sample_area_ensemble: negative generation count");
    AreaEnsemble e;
    e.law = law;
    e.x = x;
    e.seed = seed;
    e.mass_floor = policy.mass_floor;
    e.max_generation = policy.max_generation;
    e.areas.resize(count);
    e.partial.resize(count);
    e.minus.assign(static_cast<std::size_t>(minus_generations), std::vector<double>(count));
    TreeOptions o;
    o.law = law;
    o.x = x;
    o.policy = policy;
    parallel_for(count, threads, [&](std::size_t i) {
        Rng rng(seed, tree_stream(law), i);
        const CellTree tree = sample_cell_system(models, o, rng);
        const AreaEstimate a = estimate_area(tree);
        e.areas[i] = a.area;
        e.partial[i] = a.partial ? 1 : 0;
        for (int n = 0; n < minus_generations; ++n) e.minus[n][i] = intrinsic_martingales(tree, n).minus;
    });
    return e;
}

void write_area_ensemble(std::ostream& out, const AreaEnsemble& e) {
    const auto saved = out.precision(17);
    out << "# law = " << tree_law_name(e.law) << '\n';
    out << "# x = " << e.x << '\n';
    out << "# seed = " << e.seed << '\n';
    out << "# mass_floor = " << e.mass_floor << '\n';
    out << "# max_generation = " << e.max_generation << '\n';
    out << "# count = " << e.size() << '\n';
    out << "# columns = area partial";
    for (std::size_t n = 0; n < e.minus.size(); ++n) out << " minus_" << n;
    out << '\n';
    std::ostringstream row;
    row.precision(17);
    for (std::size_t i = 0; i < e.size(); ++i) {
        row.str("");
        row << e.areas[i] << ' ' << static_cast<int>(e.partial[i]);
        for (const auto& m : e.minus) row << ' ' << m[i];
        out << row.str() << '\n';
    }
    out.precision(saved);
}

void save_area_ensemble(const std::string& path, const AreaEnsemble& e) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_area_ensemble(out, e);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

AreaEnsemble read_area_ensemble(std::istream& in, const std::string& source) {
    std::string header;
    std::vector<std::string> rows;
    std::vector<int> row_lines;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty()) continue;
        if (line[0] == '#') {
            header += line.substr(1) + '\n';
        } else {
            rows.push_back(line);
            row_lines.push_back(number);
        }
    }
    KeyValueDocument meta = KeyValueDocument::parse(header, source);
    AreaEnsemble e;
    e.law = parse_tree_law(meta.get_string("law"));
    e.x = meta.get_double("x");
    e.seed = static_cast<std::uint64_t>(meta.get_int("seed"));
    e.mass_floor = meta.get_double("mass_floor");
    e.max_generation = static_cast<int>(meta.get_int("max_generation"));
    const auto count = static_cast<std::size_t>(meta.get_int("count"));
    std::istringstream cols(meta.get_string("columns"));
    std::vector<std::string> names;
    for (std::string c; cols >> c;) names.push_back(c);
    if (names.size() < 2 || names[0] != "area" || names[1] != "partial") {
        throw ConfigError(source + ": columns must start with 'area partial'");
    }
    const std::size_t minus_columns = names.size() - 2;
    if (rows.size() != count) {
        throw ConfigError(source + ": header announces " + std::to_string(count) + " rows, found " +
                          std::to_string(rows.size()));
    }
    e.areas.resize(count);
    e.partial.resize(count);
    e.minus.assign(minus_columns, std::vector<double>(count));
    for (std::size_t i = 0; i < count; ++i) {
        std::istringstream row(rows[i]);
        int partial = 0;
        bool ok = static_cast<bool>(row >> e.areas[i] >> partial);
        for (std::size_t n = 0; ok && n < minus_columns; ++n) ok = static_cast<bool>(row >> e.minus[n][i]);
        std::string rest;
        if (!ok || (row >> rest) || (partial != 0 && partial != 1) || !(e.areas[i] > 0.0)) {
            throw ConfigError(source + ":" + std::to_string(row_lines[i]) + ": malformed row '" + rows[i] + "'");
        }
        e.partial[i] = static_cast<std::uint8_t>(partial);
    }
    return e;
}

AreaEnsemble load_area_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open ensemble file '" + path + "'");
    return read_area_ensemble(in, path);
}

}  // namespace gfrag
