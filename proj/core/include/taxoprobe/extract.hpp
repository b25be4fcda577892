#pragma once

#include "taxoprobe/backend.hpp"
#include "taxoprobe/dataset.hpp"
#include "taxoprobe/store.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace taxoprobe {

struct TokenizedExample {
    std::uint64_t example_id = 0;
    std::vector<std::string> tokens; // begin/end markers included
    std::size_t source_pos = 0;      // hyponym token
    std::size_t target_pos = 0;      // hypernym token
};

struct Rejection {
    std::string reason; // "split-token"
};

using TokenizeResult = std::variant<TokenizedExample, Rejection>;

// Resolves the pattern's signed token indices against the backend
// tokenization (negative counts from the end, -1 is the end marker) and
// verifies the tokens at both positions match the inflected surface forms
// case-insensitively. Any mismatch means a subword split shifted positions.
TokenizeResult tokenize_and_locate(const ExampleSentence &example, const Pattern &pattern,
                                   const ModelBackend &backend);

// forward: attention from the hyponym's query position to the hypernym key.
AttentionMatrix extract_matrix(const AttentionTensor &tensor, const TokenizedExample &tok,
                               Direction direction);

struct PatternCounts {
    std::array<std::size_t, 5> accepted{};
    std::array<std::size_t, 5> rejected{};
};

struct ExtractionReport {
    std::map<SetLabel, PatternCounts> per_set;
    // After post-hoc intersection: rows accepted in all three sets.
    std::array<std::size_t, 5> kept_per_pattern{};
    std::size_t matrices_written = 0;
};

// Tokenizes every aligned row in the three sets, keeps only rows accepted in
// all three (so per-pattern counts stay equal across sets), extracts the
// forward/backward/average matrices of each survivor and persists them.
// Backend failure aborts the store, leaving the partial marker.
ExtractionReport batch_extract(const DatasetTriple &dataset, const ModelBackend &backend,
                               const std::string &store_prefix,
                               double row_sum_tolerance = 1e-4);

} // namespace taxoprobe
