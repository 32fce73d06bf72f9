#include "run_context.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gfrag/triplet_file.hpp"

namespace gfrag::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> shared_keys = {
    "seed",          "model.triplet",         "path.small_jump_cutoff", "path.time_step",
    "policy.mass_floor", "policy.max_generation", "policy.max_cells",   "policy.max_levy_time",
    "base.input",    "base.count",
};

bool is_triplet_key(const std::string& k) {
    return k == "sigma2" || k == "drift" || k == "alpha" || k.rfind("jumps.", 0) == 0;
}

}  // namespace

std::string cell(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

RunContext::RunContext(std::string subcommand, const GlobalOptions& options,
                       const std::vector<std::string>& known_keys, const std::vector<std::string>& all_subcommands)
    : subcommand_(std::move(subcommand)), out_dir_(options.out_dir), threads_(options.threads) {
    if (!options.config_path.empty()) {
        config_ = KeyValueDocument::load(options.config_path);
        config_dir_ = fs::path(options.config_path).parent_path();
    }
    seed_ = options.seed ? *options.seed : static_cast<std::uint64_t>(config_.get_int("seed", 1));
    reject_unknown_keys(known_keys, all_subcommands);
}

// Runs before any sampling so that a misspelt size does not silently fall
// back to its default. Sections of other subcommands are left alone: one
// config file may serve several of them.
void RunContext::reject_unknown_keys(const std::vector<std::string>& known_keys,
                                     const std::vector<std::string>& all_subcommands) const {
    const auto contains = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    for (const auto& [k, value] : config_.entries()) {
        if (contains(shared_keys, k) || is_triplet_key(k)) continue;
        const auto dot = k.find('.');
        const std::string section = dot == std::string::npos ? "" : k.substr(0, dot);
        if (section == subcommand_ && contains(known_keys, k.substr(dot + 1))) continue;
        if (section != subcommand_ && contains(all_subcommands, section)) continue;
        throw ConfigError(config_.location(k) + ": unknown key");
    }
}

double RunContext::number(const std::string& name, double fallback) const {
    return config_.get_double(key(name), fallback);
}

std::int64_t RunContext::integer(const std::string& name, std::int64_t fallback) const {
    return config_.get_int(key(name), fallback);
}

std::size_t RunContext::count(const std::string& name, std::size_t fallback) const {
    const std::int64_t v = config_.get_int(key(name), static_cast<std::int64_t>(fallback));
    if (v <= 0) throw ConfigError(config_.source() + ": " + key(name) + " must be positive");
    return static_cast<std::size_t>(v);
}

std::string RunContext::text(const std::string& name, const std::string& fallback) const {
    return config_.get_string(key(name), fallback);
}

bool RunContext::flag(const std::string& name, bool fallback) const { return config_.get_bool(key(name), fallback); }

std::vector<double> RunContext::numbers(const std::string& name, std::vector<double> fallback) const {
    return config_.get_doubles(key(name), std::move(fallback));
}

std::optional<std::string> RunContext::input_path(const std::string& full_key) const {
    if (!config_.has(full_key)) return std::nullopt;
    const fs::path p(config_.get_string(full_key));
    return (p.is_absolute() ? p : config_dir_ / p).string();
}

const LevyTriplet& RunContext::triplet() {
    if (triplet_) return *triplet_;
    if (const auto path = input_path("model.triplet")) {
        triplet_ = load_triplet(*path);
    } else if (config_.has("sigma2")) {
        triplet_ = triplet_from_document(config_);
    } else {
        throw ConfigError("no model: set model.triplet = <file> or the triplet keys in the config");
    }
    return *triplet_;
}

const CumulantProfile& RunContext::profile() {
    if (profile_) return *profile_;
    const ValidationReport report = validate_assumptions(triplet());
    if (!report.all_passed()) {
        std::string failed;
        for (const auto& c : report.checks) {
            if (!c.passed) failed += "\n  " + c.name + ": " + c.detail;
        }
        throw AssumptionFailure("model assumptions fail, run 'validate' for the full report:" + failed);
    }
    profile_ = find_cramer_roots(triplet());
    return *profile_;
}

const TreeModels& RunContext::models() {
    if (models_) return *models_;
    PathConfig path;
    path.small_jump_cutoff = config_.get_double("path.small_jump_cutoff", path.small_jump_cutoff);
    path.time_step = config_.get_double("path.time_step", path.time_step);
    path.check();
    models_.emplace(profile(), path);
    return *models_;
}

TruncationPolicy RunContext::policy() const {
    TruncationPolicy p;
    p.mass_floor = config_.get_double("policy.mass_floor", p.mass_floor);
    p.max_generation = static_cast<int>(config_.get_int("policy.max_generation", p.max_generation));
    p.max_cells = config_.get_int("policy.max_cells", p.max_cells);
    p.max_levy_time = config_.get_double("policy.max_levy_time", p.max_levy_time);
    p.check();
    return p;
}

const AreaEnsemble& RunContext::base() {
    if (base_) return *base_;
    if (const auto path = input_path("base.input")) {
        base_ = load_area_ensemble(*path);
        if (base_->law != TreeLaw::P || base_->x != 1.0) {
            throw ConfigError(*path + ": the base ensemble must be sampled under P from x = 1");
        }
    } else {
        const auto n = config_.get_int("base.count", 20000);
        if (n <= 0) throw ConfigError(config_.source() + ": base.count must be positive");
        std::fprintf(stderr, "sampling %lld base trees\n", static_cast<long long>(n));
        base_ = sample_area_ensemble(models(), TreeLaw::P, 1.0, static_cast<std::size_t>(n), policy(), stage_seed(0),
                                     1, threads_);
    }
    return *base_;
}

std::string RunContext::output_path(const std::string& name) {
    fs::create_directories(out_dir_);
    files_.push_back(name);
    return (out_dir_ / name).string();
}

std::ofstream RunContext::open_table(const std::string& name, const std::vector<std::string>& columns,
                                     const std::vector<std::pair<std::string, std::string>>& meta) {
    std::ofstream out(output_path(name));
    if (!out) throw std::runtime_error("cannot write '" + (out_dir_ / name).string() + "'");
    out << "# subcommand = " << subcommand_ << '\n';
    out << "# seed = " << seed_ << '\n';
    for (const auto& [k, v] : meta) out << "# " << k << " = " << v << '\n';
    out << "# columns =";
    for (const auto& c : columns) out << ' ' << c;
    out << '\n';
    return out;
}

void RunContext::check(const std::string& name, bool passed, json detail) {
    detail["name"] = name;
    detail["passed"] = passed;
    checks_.push_back(std::move(detail));
}

int RunContext::finish() {
    bool passed = true;
    for (const auto& c : checks_) passed = passed && c.at("passed").get<bool>();
    json summary;
    summary["subcommand"] = subcommand_;
    summary["seed"] = seed_;
    summary["config"] = config_.entries();
    summary["checks"] = checks_;
    summary["results"] = results_;
    summary["files"] = files_;
    summary["passed"] = passed;
    fs::create_directories(out_dir_);
    const fs::path path = out_dir_ / (subcommand_ + ".json");
    std::ofstream out(path);
    out << summary.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    for (const auto& c : checks_) {
        std::printf("%s  %s\n", c.at("passed").get<bool>() ? "pass" : "FAIL", c.at("name").get<std::string>().c_str());
    }
    std::printf("%s: %s (summary in %s)\n", subcommand_.c_str(), passed ? "all checks pass" : "some checks fail",
                path.string().c_str());
    return passed ? 0 : 1;
}

}  // namespace gfrag::cli
