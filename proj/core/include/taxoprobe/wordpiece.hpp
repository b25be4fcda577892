#pragma once

#include <string>
#include <unordered_set>
#include <vector>

namespace taxoprobe {

// Uncased WordPiece tokenizer: lowercase, split off punctuation, then
// greedy longest-match against the vocabulary with "##" continuations.
// Words longer than 100 chars or with no match become the unk token.
class WordPieceTokenizer {
public:
    explicit WordPieceTokenizer(const std::string &vocab_path);

    std::vector<std::string> tokenize(const std::string &text) const;

    const std::string &vocab_id() const { return vocab_id_; }

    static std::vector<std::string> basic_split(const std::string &text);

private:
    std::unordered_set<std::string> vocab_;
    std::string vocab_id_;
};

} // namespace taxoprobe
