#include "taxoprobe/norms.hpp"

#include "taxoprobe/tsv.hpp"

#include <algorithm>

namespace taxoprobe {

std::vector<NormTriple> load_feature_norms(const std::string &path, const NormsColumns &cols) {
    Table t = read_table(path, cols.delimiter);
    std::size_t ci, fi, ri;
    try {
        ci = t.column(cols.concept_col);
        fi = t.column(cols.feature_col);
        ri = t.column(cols.relation_col);
    } catch (const ParseError &e) {
        throw ParseError(path + ": " + e.what());
    }
    const std::size_t need = std::max({ci, fi, ri}) + 1;
    std::vector<NormTriple> out;
    out.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto &row = t.rows[i];
        if (row.size() < need)
            throw ParseError(path + ": row " + std::to_string(i + 1) + " has " +
                             std::to_string(row.size()) + " columns, need " +
                             std::to_string(need));
        NormTriple triple{row[ci], row[fi], row[ri]};
        if (triple.concept_name.empty() || triple.feature.empty() || triple.relation.empty())
            throw ParseError(path + ": row " + std::to_string(i + 1) + " has an empty field");
        out.push_back(std::move(triple));
    }
    return out;
}

} // namespace taxoprobe
