#pragma once

#include "taxoprobe/config.hpp"
#include "taxoprobe/dataset.hpp"
#include "taxoprobe/extract.hpp"
#include "taxoprobe/probe.hpp"

#include <string>
#include <vector>

namespace taxoprobe {

// Exit codes shared by the CLI and the pipeline steps.
enum ExitCode {
    exit_ok = 0,
    exit_failure = 1,
    exit_input = 2,
    exit_backend = 3,
    exit_overwrite = 4,
    exit_missing_set = 5,
    exit_empty_store = 6,
};

// Thrown by pipeline steps; the CLI turns it into the mapped exit code.
class PipelineError : public std::runtime_error {
public:
    PipelineError(ExitCode code, const std::string &msg)
        : std::runtime_error(msg), code(code) {}
    ExitCode code;
};

// build-dataset: positive.tsv/negative.tsv/sisters.tsv + build_report.json
// under config.out_dir.
BuildReport cmd_build_dataset(const RunConfig &config);

// extract: reads the three TSVs, writes the matrix store and
// extraction_report.json.
ExtractionReport cmd_extract(const RunConfig &config);

// probe: probe_results.tsv + the formatted table (returned for printing).
struct ProbeOutput {
    std::vector<ProbeResult> results;
    std::string table;
};
ProbeOutput cmd_probe(const RunConfig &config);

// visualize: 9 panels per pattern plus the all-pattern group, first/last
// layer skewness figures per pattern and overall, skewness_summary.tsv.
struct VisualizeOutput {
    std::vector<std::string> figures;
    std::string skewness_tsv;
};
VisualizeOutput cmd_visualize(const RunConfig &config);

// Writes <out_dir>/run_metadata.json (config hash, lexicon version, backend
// identity, seed). Each step calls this with what it knows.
void write_run_metadata(const RunConfig &config, const std::string &lexicon_version,
                        const std::string &backend_identity);

} // namespace taxoprobe
