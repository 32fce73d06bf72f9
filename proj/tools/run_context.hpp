#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "gfrag/area_ensemble.hpp"
#include "gfrag/cell_system.hpp"
#include "gfrag/key_value.hpp"
#include "gfrag/levy_model.hpp"

namespace gfrag::cli {

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    unsigned threads = 0;
};

// The model failed validate_assumptions; nothing that depends on it may run.
class AssumptionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// State of one subcommand run: config, model, seeds and the files it writes.
//
// Seed rule: stage k of a subcommand draws from seed + k; stage 0 is the
// shared P₁ base ensemble. Within a stage, item i uses the Philox stream
// (seed + k, stream kind, i), so results do not depend on the thread count.
class RunContext {
public:
    // `known_keys` are the keys of this subcommand's section (without the
    // prefix); any other key in that section is a config error.
    RunContext(std::string subcommand, const GlobalOptions& options, const std::vector<std::string>& known_keys,
               const std::vector<std::string>& all_subcommands);

    const std::string& subcommand() const noexcept { return subcommand_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stage_seed(int stage) const { return seed_ + static_cast<std::uint64_t>(stage); }
    unsigned threads() const noexcept { return threads_; }

    // Keys under this subcommand's section, e.g. "tail-fit.input".
    double number(const std::string& key, double fallback) const;
    std::int64_t integer(const std::string& key, std::int64_t fallback) const;
    std::size_t count(const std::string& key, std::size_t fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
    // Relative paths are taken from the config file's directory.
    std::optional<std::string> input_path(const std::string& key) const;

    const LevyTriplet& triplet();
    // Throws AssumptionFailure when the triplet fails validation.
    const CumulantProfile& profile();
    const TreeModels& models();
    TruncationPolicy policy() const;

    // P₁ ensemble from base.input, or base.count fresh trees on stage 0.
    const AreaEnsemble& base();

    // Opens <out>/<name> and writes the '#' header: subcommand, seed, the
    // extra metadata, then the column names.
    std::ofstream open_table(const std::string& name, const std::vector<std::string>& columns,
                             const std::vector<std::pair<std::string, std::string>>& meta = {});
    // Registers a file written by other means (it still lands in the summary).
    std::string output_path(const std::string& name);

    void check(const std::string& name, bool passed, nlohmann::json detail = nlohmann::json::object());
    nlohmann::json& results() { return results_; }

    // Writes <out>/<subcommand>.json and returns the exit status.
    int finish();

private:
    std::string key(const std::string& name) const { return subcommand_ + "." + name; }
    void reject_unknown_keys(const std::vector<std::string>& known_keys,
                             const std::vector<std::string>& all_subcommands) const;

    std::string subcommand_;
    KeyValueDocument config_;
    std::filesystem::path config_dir_;
    std::filesystem::path out_dir_;
    std::uint64_t seed_ = 1;
    unsigned threads_ = 0;
    std::optional<LevyTriplet> triplet_;
    std::optional<CumulantProfile> profile_;
    std::optional<TreeModels> models_;
    std::optional<AreaEnsemble> base_;
    std::vector<std::string> files_;
    nlohmann::json checks_ = nlohmann::json::array();
    nlohmann::json results_ = nlohmann::json::object();
};

// Formats a double for table output (17 significant digits, "inf" for +inf).
std::string cell(double value);

}  // namespace gfrag::cli
