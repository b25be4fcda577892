#include "taxoprobe/config.hpp"

#include "taxoprobe/tsv.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

namespace taxoprobe {

namespace {

std::string trim(const std::string &s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::uint64_t parse_u64(const std::string &value, const std::string &key) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size())
        throw ParseError("config: bad integer for " + key + ": '" + value + "'");
    return v;
}

double parse_double(const std::string &value, const std::string &key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception &) {
        throw ParseError("config: bad number for " + key + ": '" + value + "'");
    }
}

bool parse_bool(const std::string &value, const std::string &key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ParseError("config: bad boolean for " + key + ": '" + value + "'");
}

char parse_delimiter(const std::string &value) {
    if (value == "tab" || value == "\\t") return '\t';
    if (value == "comma") return ',';
    if (value == "semicolon") return ';';
    if (value.size() == 1) return value[0];
    throw ParseError("config: bad delimiter '" + value + "'");
}

} // namespace

RunConfig parse_config_text(const std::string &text, const std::string &origin) {
    RunConfig cfg;
    bool split_seed_explicit = false;

    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ParseError(origin + ":" + std::to_string(lineno) +
                             ": expected 'key = value', got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        if (key == "norms_path") cfg.norms_path = value;
        else if (key == "wordnet_path") cfg.wordnet_path = value;
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "store_prefix") cfg.store_prefix = value;
        else if (key == "backend") cfg.backend = value;
        else if (key == "seed") cfg.seed = parse_u64(value, key);
        else if (key == "force") cfg.force = parse_bool(value, key);
        else if (key == "norms_concept_col") cfg.norms_columns.concept_col = value;
        else if (key == "norms_feature_col") cfg.norms_columns.feature_col = value;
        else if (key == "norms_relation_col") cfg.norms_columns.relation_col = value;
        else if (key == "norms_delimiter") cfg.norms_columns.delimiter = parse_delimiter(value);
        else if (key == "probe_c") cfg.probe.c = parse_double(value, key);
        else if (key == "probe_max_iterations")
            cfg.probe.max_iterations = static_cast<int>(parse_u64(value, key));
        else if (key == "probe_tolerance") cfg.probe.tolerance = parse_double(value, key);
        else if (key == "probe_train_fraction")
            cfg.probe.train_fraction = parse_double(value, key);
        else if (key == "probe_split_seed") {
            cfg.probe.split_seed = parse_u64(value, key);
            split_seed_explicit = true;
        } else if (key == "probe_direction")
            cfg.probe.direction = direction_from_string(value);
        else if (key == "probe_cv_folds")
            cfg.probe.cv_folds = static_cast<int>(parse_u64(value, key));
        else if (key == "figure_cell_px")
            cfg.figure_cell_px = static_cast<std::uint32_t>(parse_u64(value, key));
        else
            throw ParseError(origin + ":" + std::to_string(lineno) + ": unknown config key '" +
                             key + "'");
    }
    if (!split_seed_explicit) cfg.probe.split_seed = cfg.seed;
    return cfg;
}

RunConfig parse_config_file(const std::string &path) {
    return parse_config_text(read_text_file(path), path);
}

std::string RunConfig::serialize() const {
    char buf[64];
    std::string out;
    auto kv = [&out](const std::string &k, const std::string &v) { out += k + " = " + v + "\n"; };
    kv("norms_path", norms_path);
    kv("wordnet_path", wordnet_path);
    kv("out_dir", out_dir);
    kv("store_prefix", store());
    kv("backend", backend);
    kv("seed", std::to_string(seed));
    kv("force", force ? "true" : "false");
    kv("norms_concept_col", norms_columns.concept_col);
    kv("norms_feature_col", norms_columns.feature_col);
    kv("norms_relation_col", norms_columns.relation_col);
    kv("norms_delimiter", norms_columns.delimiter == '\t' ? "tab" : std::string(1, norms_columns.delimiter));
    std::snprintf(buf, sizeof buf, "%g", probe.c);
    kv("probe_c", buf);
    kv("probe_max_iterations", std::to_string(probe.max_iterations));
    std::snprintf(buf, sizeof buf, "%g", probe.tolerance);
    kv("probe_tolerance", buf);
    std::snprintf(buf, sizeof buf, "%g", probe.train_fraction);
    kv("probe_train_fraction", buf);
    kv("probe_split_seed", std::to_string(probe.split_seed));
    kv("probe_direction", to_string(probe.direction));
    kv("probe_cv_folds", std::to_string(probe.cv_folds));
    kv("figure_cell_px", std::to_string(figure_cell_px));
    return out;
}

std::string RunConfig::hash() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(serialize())));
    return buf;
}

} // namespace taxoprobe
