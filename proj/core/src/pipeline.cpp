#include "taxoprobe/pipeline.hpp"

#include "taxoprobe/analysis.hpp"
#include "taxoprobe/heatmap.hpp"
#include "taxoprobe/tsv.hpp"

#include <json.hpp>

#include <filesystem>
#include <set>

namespace taxoprobe {

namespace fs = std::filesystem;

namespace {

void ensure_out_dir(const RunConfig &config) { fs::create_directories(config.out_dir); }

std::string dataset_path(const RunConfig &config, SetLabel label) {
    // file names follow the published dataset ("sisters.tsv", not "sister")
    const char *name = label == SetLabel::positive ? "positive.tsv"
                       : label == SetLabel::negative ? "negative.tsv"
                                                     : "sisters.tsv";
    return (fs::path(config.out_dir) / name).string();
}

nlohmann::json base_metadata(const RunConfig &config) {
    nlohmann::json meta;
    meta["config_hash"] = config.hash();
    meta["seed"] = config.seed;
    meta["backend"] = config.backend;
    return meta;
}

} // namespace

void write_run_metadata(const RunConfig &config, const std::string &lexicon_version,
                        const std::string &backend_identity) {
    ensure_out_dir(config);
    const std::string path = (fs::path(config.out_dir) / "run_metadata.json").string();
    nlohmann::json meta;
    if (fs::exists(path)) {
        try {
            meta = nlohmann::json::parse(read_text_file(path));
        } catch (...) {
            meta = nlohmann::json::object();
        }
    }
    meta["config_hash"] = config.hash();
    meta["config"] = config.serialize();
    meta["seed"] = config.seed;
    if (!lexicon_version.empty()) meta["lexicon_version"] = lexicon_version;
    if (!backend_identity.empty()) meta["backend"] = backend_identity;
    write_text_file(path, meta.dump(2) + "\n");
}

BuildReport cmd_build_dataset(const RunConfig &config) {
    if (config.norms_path.empty() || !fs::exists(config.norms_path))
        throw PipelineError(exit_input, "feature norms file not found: " +
                                            (config.norms_path.empty() ? std::string("(unset)")
                                                                       : config.norms_path));
    if (config.wordnet_path.empty() || !fs::exists(config.wordnet_path))
        throw PipelineError(exit_input, "lexical database not found: " +
                                            (config.wordnet_path.empty() ? std::string("(unset)")
                                                                         : config.wordnet_path));

    std::vector<NormTriple> norms;
    LexicalDatabase db;
    try {
        norms = load_feature_norms(config.norms_path, config.norms_columns);
        db = load_wordnet(config.wordnet_path);
    } catch (const ParseError &e) {
        throw PipelineError(exit_input, e.what());
    }

    BuildReport report;
    DatasetTriple dataset = build_all(norms, db, &report);
    if (dataset.positive.empty())
        throw PipelineError(exit_input, "no usable noun pairs in " + config.norms_path);

    ensure_out_dir(config);
    export_tsv(dataset.positive, dataset_path(config, SetLabel::positive), SetLabel::positive);
    export_tsv(dataset.negative, dataset_path(config, SetLabel::negative), SetLabel::negative);
    export_tsv(dataset.sister, dataset_path(config, SetLabel::sister), SetLabel::sister);

    nlohmann::json j = base_metadata(config);
    j["lexicon_version"] = db.version();
    j["norm_triples"] = report.norm_triples;
    j["positive_pairs"] = report.positive_pairs;
    j["usable_pairs"] = report.usable_pairs;
    j["dropped"] = {{"multiword", report.dropped_multiword},
                    {"no_negative", report.dropped_no_negative},
                    {"no_sister", report.dropped_no_sister}};
    j["examples_per_set"] = report.examples_per_set;
    write_text_file((fs::path(config.out_dir) / "build_report.json").string(), j.dump(2) + "\n");

    write_run_metadata(config, db.version(), "");
    return report;
}

ExtractionReport cmd_extract(const RunConfig &config) {
    DatasetTriple dataset;
    for (SetLabel label : {SetLabel::positive, SetLabel::negative, SetLabel::sister}) {
        const std::string path = dataset_path(config, label);
        if (!fs::exists(path))
            throw PipelineError(exit_input, "dataset file not found: " + path +
                                                " (run build-dataset first)");
    }
    try {
        dataset.positive = import_tsv(dataset_path(config, SetLabel::positive), SetLabel::positive);
        dataset.negative = import_tsv(dataset_path(config, SetLabel::negative), SetLabel::negative);
        dataset.sister = import_tsv(dataset_path(config, SetLabel::sister), SetLabel::sister);
    } catch (const ParseError &e) {
        throw PipelineError(exit_input, e.what());
    }

    const std::string prefix = config.store();
    if (store_exists(prefix)) {
        if (!config.force)
            throw PipelineError(exit_overwrite,
                                "matrix store already exists: " + prefix + " (use --force)");
        remove_store(prefix);
    }

    std::unique_ptr<ModelBackend> backend;
    try {
        backend = make_backend(config.backend, config.seed);
    } catch (const std::exception &e) {
        throw PipelineError(exit_backend, e.what());
    }

    ExtractionReport report;
    try {
        report = batch_extract(dataset, *backend, prefix);
    } catch (const BackendError &e) {
        throw PipelineError(exit_backend, std::string("backend failure: ") + e.what());
    } catch (const StoreError &e) {
        throw PipelineError(exit_input, std::string("store failure: ") + e.what());
    }

    ensure_out_dir(config);
    nlohmann::json j = base_metadata(config);
    j["backend"] = backend->name();
    j["tokenizer"] = backend->tokenizer_id();
    j["layers"] = backend->layers();
    j["heads"] = backend->heads();
    j["matrices_written"] = report.matrices_written;
    for (const auto &[label, counts] : report.per_set) {
        nlohmann::json c;
        c["accepted"] = counts.accepted;
        c["rejected"] = counts.rejected;
        j["per_set"][to_string(label)] = std::move(c);
    }
    j["kept_per_pattern"] = report.kept_per_pattern;
    write_text_file((fs::path(config.out_dir) / "extraction_report.json").string(),
                    j.dump(2) + "\n");

    write_run_metadata(config, "", backend->name());
    return report;
}

ProbeOutput cmd_probe(const RunConfig &config) {
    const std::string prefix = config.store();
    if (!fs::exists(prefix + ".index.tsv") && !store_is_partial(prefix))
        throw PipelineError(exit_input, "matrix store not found: " + prefix +
                                            " (run extract first)");

    ProbeOutput out;
    try {
        MatrixStoreReader store(prefix);
        out.results = run_experiments(store, config.probe);
    } catch (const StoreError &e) {
        const std::string what = e.what();
        if (what.find("missing the") != std::string::npos)
            throw PipelineError(exit_missing_set, what);
        throw PipelineError(exit_input, what);
    }
    out.table = format_results_table(out.results);

    ensure_out_dir(config);
    write_results_tsv(out.results, (fs::path(config.out_dir) / "probe_results.tsv").string());
    write_run_metadata(config, "", "");
    return out;
}

VisualizeOutput cmd_visualize(const RunConfig &config) {
    const std::string prefix = config.store();
    if (!fs::exists(prefix + ".index.tsv") && !store_is_partial(prefix))
        throw PipelineError(exit_input, "matrix store not found: " + prefix +
                                            " (run extract first)");

    VisualizeOutput out;
    try {
        MatrixStoreReader store(prefix);
        if (store.entries().empty())
            throw PipelineError(exit_empty_store, "matrix store is empty: " + prefix);

        std::set<int> patterns_present;
        for (const auto &e : store.entries()) patterns_present.insert(e.pattern);

        const std::string fig_dir = (fs::path(config.out_dir) / "figures").string();
        fs::create_directories(fig_dir);

        const std::map<std::string, std::string> meta = {
            {"config_hash", config.hash()},
            {"backend", config.backend},
        };

        constexpr SetLabel sets[3] = {SetLabel::positive, SetLabel::negative, SetLabel::sister};
        constexpr Direction dirs[3] = {Direction::forward, Direction::backward,
                                       Direction::average};
        // figure name parts: F/B/A x P/N/S, the layout of the published panels
        auto panel_code = [](Direction d, SetLabel s) {
            std::string code;
            code += d == Direction::forward ? 'F' : d == Direction::backward ? 'B' : 'A';
            code += s == SetLabel::positive ? 'P' : s == SetLabel::negative ? 'N' : 'S';
            return code;
        };

        struct Group {
            std::string tag;              // "P1".."P5" or "ALL"
            std::optional<int> pattern;   // nullopt = all patterns
        };
        std::vector<Group> groups;
        for (int p : patterns_present) groups.push_back({"P" + std::to_string(p), p});
        if (patterns_present.size() > 1) groups.push_back({"ALL", std::nullopt});

        for (const auto &group : groups) {
            // shared color scale [0, max] across the group's nine panels
            std::vector<std::pair<std::string, MeanMatrix>> panels;
            double scale_max = 0.0;
            for (Direction d : dirs) {
                for (SetLabel s : sets) {
                    MeanMatrix mean = average_matrix(store, s, group.pattern, d);
                    for (double v : mean.values) scale_max = std::max(scale_max, v);
                    panels.emplace_back(panel_code(d, s), std::move(mean));
                }
            }
            for (auto &[code, mean] : panels) {
                HeatmapSpec spec;
                spec.dataset = code[1] == 'P' ? "positive" : code[1] == 'N' ? "negative" : "sister";
                spec.pattern = group.pattern ? std::to_string(*group.pattern) : "all";
                spec.direction = code[0] == 'F'   ? "forward"
                                 : code[0] == 'B' ? "backward"
                                                  : "average";
                spec.output_path = (fs::path(fig_dir) / (group.tag + "_" + code + ".png")).string();
                spec.scale_min = 0.0;
                spec.scale_max = scale_max;
                spec.cell_px = config.figure_cell_px;
                spec.metadata = meta;
                render_heatmap(mean, spec);
                out.figures.push_back(spec.output_path);
            }
        }

        // first/last layer skewness, one figure per pattern group
        std::string skew_tsv = "dataset\tdirection\tpattern\tlayer\thead\tskewness\n";
        const Direction skew_dir = config.probe.direction;
        for (const auto &group : groups) {
            for (LayerChoice which : {LayerChoice::first, LayerChoice::last}) {
                std::vector<SkewnessReport> reports;
                try {
                    for (SetLabel s : sets)
                        reports.push_back(layer_skewness(store, s, skew_dir, which, group.pattern));
                } catch (const StoreError &) {
                    continue; // fewer than 3 examples in this slice
                }
                const std::string which_name = which == LayerChoice::first ? "first" : "last";
                const std::string path =
                    (fs::path(fig_dir) / (group.tag + "_" + which_name + "_skew.png")).string();
                render_skewness_figure(reports, path, meta);
                out.figures.push_back(path);

                for (const auto &r : reports) {
                    for (std::size_t h = 0; h < r.skewness.size(); ++h) {
                        skew_tsv += std::string(to_string(r.dataset)) + "\t" +
                                    to_string(r.direction) + "\t" +
                                    (group.pattern ? std::to_string(*group.pattern)
                                                   : std::string("all")) +
                                    "\t" + std::to_string(r.layer_index) + "\t" +
                                    std::to_string(h) + "\t";
                        if (r.skewness[h]) {
                            char buf[48];
                            std::snprintf(buf, sizeof buf, "%.9g", *r.skewness[h]);
                            skew_tsv += buf;
                        } else {
                            skew_tsv += "NA";
                        }
                        skew_tsv += '\n';
                    }
                }
            }
        }
        out.skewness_tsv = (fs::path(config.out_dir) / "skewness_summary.tsv").string();
        write_text_file(out.skewness_tsv, skew_tsv);
    } catch (const PipelineError &) {
        throw;
    } catch (const StoreError &e) {
        throw PipelineError(exit_input, e.what());
    }

    write_run_metadata(config, "", "");
    return out;
}

} // namespace taxoprobe
