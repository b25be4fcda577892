#pragma once

#include "taxoprobe/attention.hpp"
#include "taxoprobe/norms.hpp"
#include "taxoprobe/probe.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace taxoprobe {

// Run configuration: `key = value` lines, '#' comments. Unknown keys are an
// error so typos fail loudly. Command-line flags override file values.
struct RunConfig {
    std::string norms_path;
    std::string wordnet_path;
    std::string out_dir = "out";
    std::string store_prefix; // default: <out_dir>/matrices
    std::string backend = "stub";
    std::uint64_t seed = 42;
    bool force = false;

    NormsColumns norms_columns;
    ProbeConfig probe;
    std::uint32_t figure_cell_px = 24;

    std::string store() const { return store_prefix.empty() ? out_dir + "/matrices" : store_prefix; }

    // FNV-1a hex digest of the effective key=value serialization; embedded
    // in output metadata so artifacts are traceable to their config.
    std::string hash() const;
    std::string serialize() const;
};

RunConfig parse_config_file(const std::string &path);
RunConfig parse_config_text(const std::string &text, const std::string &origin);

} // namespace taxoprobe
