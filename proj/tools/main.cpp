// Command-line front end for the hypernymy attention pipeline:
//   build-dataset -> extract -> probe -> visualize, or `all` for the chain.

#include "taxoprobe/pipeline.hpp"
#include "taxoprobe/tsv.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

using namespace taxoprobe;

namespace {

struct CliOverrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> direction;
    std::optional<std::string> out_dir;
    bool force = false;
};

RunConfig resolve_config(const CliOverrides &cli) {
    RunConfig cfg;
    if (!cli.config_path.empty()) cfg = parse_config_file(cli.config_path);
    if (cli.seed) {
        cfg.seed = *cli.seed;
        cfg.probe.split_seed = *cli.seed;
    }
    if (cli.direction) cfg.probe.direction = direction_from_string(*cli.direction);
    if (cli.out_dir) cfg.out_dir = *cli.out_dir;
    if (cli.force) cfg.force = true;
    return cfg;
}

int do_build(const RunConfig &cfg) {
    BuildReport report = cmd_build_dataset(cfg);
    std::printf("norm triples:        %zu\n", report.norm_triples);
    std::printf("positive pairs:      %zu\n", report.positive_pairs);
    std::printf("usable pairs:        %zu\n", report.usable_pairs);
    std::printf("dropped (multiword): %zu\n", report.dropped_multiword);
    std::printf("dropped (no neg.):   %zu\n", report.dropped_no_negative);
    std::printf("dropped (no sis.):   %zu\n", report.dropped_no_sister);
    std::printf("examples per set:    %zu\n", report.examples_per_set);
    return exit_ok;
}

int do_extract(const RunConfig &cfg) {
    ExtractionReport report = cmd_extract(cfg);
    std::printf("pattern   kept\n");
    for (std::size_t p = 0; p < report.kept_per_pattern.size(); ++p)
        std::printf("%zu         %zu\n", p + 1, report.kept_per_pattern[p]);
    std::printf("matrices written: %zu\n", report.matrices_written);
    return exit_ok;
}

int do_probe(const RunConfig &cfg) {
    ProbeOutput out = cmd_probe(cfg);
    std::fputs(out.table.c_str(), stdout);
    return exit_ok;
}

int do_visualize(const RunConfig &cfg) {
    VisualizeOutput out = cmd_visualize(cfg);
    std::printf("wrote %zu figures and %s\n", out.figures.size(), out.skewness_tsv.c_str());
    return exit_ok;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"hypernymy attention probing pipeline"};
    app.require_subcommand(1);

    CliOverrides cli;
    app.add_option("--config", cli.config_path, "run configuration file");
    std::uint64_t seed_value = 0;
    auto *seed_opt = app.add_option("--seed", seed_value, "override the global seed");
    std::string direction_value;
    auto *dir_opt =
        app.add_option("--direction", direction_value, "forward, backward or average");
    std::string out_dir_value;
    auto *out_opt = app.add_option("--out-dir", out_dir_value, "output directory");
    app.add_flag("--force", cli.force, "overwrite an existing matrix store");

    auto *build = app.add_subcommand("build-dataset", "build the three aligned test sets");
    auto *extract = app.add_subcommand("extract", "extract attention matrices into the store");
    auto *probe = app.add_subcommand("probe", "train and evaluate the set classifier");
    auto *visualize = app.add_subcommand("visualize", "render heatmaps and skewness figures");
    auto *all = app.add_subcommand("all", "run the whole pipeline");

    CLI11_PARSE(app, argc, argv);

    if (*seed_opt) cli.seed = seed_value;
    if (*dir_opt) cli.direction = direction_value;
    if (*out_opt) cli.out_dir = out_dir_value;

    try {
        const RunConfig cfg = resolve_config(cli);
        if (build->parsed()) return do_build(cfg);
        if (extract->parsed()) return do_extract(cfg);
        if (probe->parsed()) return do_probe(cfg);
        if (visualize->parsed()) return do_visualize(cfg);
        if (all->parsed()) {
            int rc = do_build(cfg);
            if (rc == exit_ok) rc = do_extract(cfg);
            if (rc == exit_ok) rc = do_probe(cfg);
            if (rc == exit_ok) rc = do_visualize(cfg);
            return rc;
        }
    } catch (const PipelineError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code;
    } catch (const ParseError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_failure;
    }
    return exit_failure;
}
