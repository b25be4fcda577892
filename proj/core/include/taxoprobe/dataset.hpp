#pragma once

#include "taxoprobe/lexicon.hpp"
#include "taxoprobe/norms.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace taxoprobe {

enum class SetLabel { positive, negative, sister };

const char *to_string(SetLabel label);
SetLabel set_label_from_string(const std::string &s);

struct NounPair {
    std::string hyponym_raw;
    std::string hypernym_raw; // in counterfactual sets: the matched non-hypernym filler
    SetLabel set_label = SetLabel::positive;
    // For counterfactuals, the positive pair this one was derived from.
    std::optional<std::pair<std::string, std::string>> origin;
};

struct Pattern {
    int id = 0;                 // 1..5
    std::string template_text;  // verbatim pattern-table string, [hypo]/[hyper]/[a(n)] slots
    bool hypo_plural = false;
    bool hyper_plural = false;
    bool needs_determiner = false;
    int source_index = 0;       // signed token index of the hyponym, markers included
    int target_index = 0;       // signed token index of the hypernym slot
};

// The five sentence patterns, in table order.
const std::array<Pattern, 5> &patterns();
const Pattern &pattern_by_id(int id);

struct ExampleSentence {
    std::uint64_t id = 0; // unique over the union of the three sets
    int pattern = 0;
    std::string text;
    std::string hyponym;  // inflected surface form
    std::string hypernym; // inflected surface form
    std::string hyponym_raw;
    std::string hypernym_raw;
    SetLabel set_label = SetLabel::positive;
};

// Positive pairs: one per distinct (concept, feature) whose relation equals
// "superordinate" (case-insensitive). Fields are lowercased and a leading
// "a_"/"an_" determiner prefix is stripped from the feature, which is how
// the norms encode superordinate features.
std::vector<NounPair> extract_positive_pairs(const std::vector<NormTriple> &norms);

std::optional<NounPair> build_negative_pair(const NounPair &pair, const LexicalDatabase &db);
std::optional<NounPair> build_sister_pair(const NounPair &pair, const LexicalDatabase &db);

// Throws std::invalid_argument when a filler is not a single token.
ExampleSentence instantiate_pattern(const Pattern &pattern, const NounPair &pair,
                                    std::uint64_t id);

struct DatasetTriple {
    std::vector<ExampleSentence> positive;
    std::vector<ExampleSentence> negative;
    std::vector<ExampleSentence> sister;

    const std::vector<ExampleSentence> &set(SetLabel label) const;
};

struct BuildReport {
    std::size_t norm_triples = 0;
    std::size_t positive_pairs = 0;
    std::size_t usable_pairs = 0; // pairs with both counterfactuals
    std::size_t dropped_multiword = 0;
    std::size_t dropped_no_negative = 0;
    std::size_t dropped_no_sister = 0;
    std::size_t examples_per_set = 0;
};

// Instantiates every usable positive pair across all five patterns in all
// three sets. A pair missing either counterfactual is dropped from all sets
// so the sets stay aligned. Ids run consecutively from 0 in row order
// (positive, negative, sister per row).
DatasetTriple build_all(const std::vector<NormTriple> &norms, const LexicalDatabase &db,
                        BuildReport *report = nullptr);

// TSV schema: id, pattern, text, hyponym, hypernym, hyponym_raw, hypernym_raw.
void export_tsv(const std::vector<ExampleSentence> &examples, const std::string &path,
                SetLabel label);
std::vector<ExampleSentence> import_tsv(const std::string &path, SetLabel label);

} // namespace taxoprobe
