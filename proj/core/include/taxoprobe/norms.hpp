#pragma once

#include <string>
#include <vector>

namespace taxoprobe {

struct NormTriple {
    std::string concept_name;
    std::string feature;
    std::string relation; // label kept verbatim
};

struct NormsColumns {
    std::string concept_col = "concept";
    std::string feature_col = "feature";
    std::string relation_col = "relation";
    char delimiter = '\t';
};

// Reads a delimited feature-norms file with a header row. Rows shorter than
// the required columns raise ParseError naming the row.
std::vector<NormTriple> load_feature_norms(const std::string &path,
                                           const NormsColumns &cols = {});

} // namespace taxoprobe
