#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "commands.hpp"
#include "gfrag/stats.hpp"

int main(int argc, char** argv) {
    using namespace gfrag::cli;
    CLI::App app{"Growth-fragmentation experiment runner"};
    app.require_subcommand(1);
    GlobalOptions options;
    options.threads = gfrag::default_thread_count();
    std::uint64_t seed = 0;
    app.add_option("--config", options.config_path, "Key = value config file")->check(CLI::ExistingFile);
    auto* seed_option = app.add_option("--seed", seed, "Top-level seed (overrides the config's seed)");
    app.add_option("--out", options.out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", options.threads, "Worker threads, 0 = all cores (default: GFRAG_THREADS)");

    std::vector<std::string> names;
    for (const Command& c : commands()) names.push_back(c.name);
    const Command* selected = nullptr;
    for (const Command& c : commands()) {
        app.add_subcommand(c.name, c.description)->callback([&selected, &c] { selected = &c; });
    }
    CLI11_PARSE(app, argc, argv);
    if (*seed_option) options.seed = seed;

    try {
        RunContext ctx(selected->name, options, selected->keys, names);
        selected->run(ctx);
        return ctx.finish();
    } catch (const AssumptionFailure& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
