#include "taxoprobe/extract.hpp"

#include "taxoprobe/tsv.hpp"

#include <cmath>
#include <stdexcept>

namespace taxoprobe {

const char *to_string(Direction d) {
    switch (d) {
    case Direction::forward: return "forward";
    case Direction::backward: return "backward";
    case Direction::average: return "average";
    }
    return "?";
}

Direction direction_from_string(const std::string &s) {
    if (s == "forward") return Direction::forward;
    if (s == "backward") return Direction::backward;
    if (s == "average") return Direction::average;
    throw std::invalid_argument("unknown direction '" + s + "'");
}

namespace {

// -1 addresses the end marker.
std::optional<std::size_t> resolve_index(int signed_index, std::size_t len) {
    long idx = signed_index;
    if (idx < 0) idx += static_cast<long>(len);
    if (idx < 0 || idx >= static_cast<long>(len)) return std::nullopt;
    return static_cast<std::size_t>(idx);
}

} // namespace

TokenizeResult tokenize_and_locate(const ExampleSentence &example, const Pattern &pattern,
                                   const ModelBackend &backend) {
    const auto tokens = backend.tokenize(example.text);
    const auto src = resolve_index(pattern.source_index, tokens.size());
    const auto tgt = resolve_index(pattern.target_index, tokens.size());
    if (!src || !tgt) return Rejection{"split-token"};
    if (to_lower(tokens[*src]) != to_lower(example.hyponym) ||
        to_lower(tokens[*tgt]) != to_lower(example.hypernym))
        return Rejection{"split-token"};

    TokenizedExample tok;
    tok.example_id = example.id;
    tok.tokens = tokens;
    tok.source_pos = *src;
    tok.target_pos = *tgt;
    return tok;
}

AttentionMatrix extract_matrix(const AttentionTensor &tensor, const TokenizedExample &tok,
                               Direction direction) {
    if (tok.source_pos >= tensor.seq_len || tok.target_pos >= tensor.seq_len)
        throw std::out_of_range("focus token position outside attention tensor");

    AttentionMatrix m;
    m.layers = tensor.layers;
    m.heads = tensor.heads;
    m.values.resize(static_cast<std::size_t>(tensor.layers) * tensor.heads);
    m.direction = direction;
    m.example_id = tok.example_id;

    const auto s = static_cast<std::uint32_t>(tok.source_pos);
    const auto t = static_cast<std::uint32_t>(tok.target_pos);
    for (std::uint32_t l = 0; l < tensor.layers; ++l) {
        for (std::uint32_t h = 0; h < tensor.heads; ++h) {
            switch (direction) {
            case Direction::forward: m.at(l, h) = tensor.at(l, h, s, t); break;
            case Direction::backward: m.at(l, h) = tensor.at(l, h, t, s); break;
            case Direction::average:
                m.at(l, h) = static_cast<float>(
                    (static_cast<double>(tensor.at(l, h, s, t)) +
                     static_cast<double>(tensor.at(l, h, t, s))) *
                    0.5);
                break;
            }
        }
    }
    return m;
}

ExtractionReport batch_extract(const DatasetTriple &dataset, const ModelBackend &backend,
                               const std::string &store_prefix, double row_sum_tolerance) {
    if (dataset.positive.size() != dataset.negative.size() ||
        dataset.positive.size() != dataset.sister.size())
        throw std::invalid_argument("batch_extract: the three sets are not aligned");

    ExtractionReport report;
    report.per_set[SetLabel::positive] = {};
    report.per_set[SetLabel::negative] = {};
    report.per_set[SetLabel::sister] = {};

    MatrixStoreWriter writer(store_prefix);

    constexpr Direction directions[3] = {Direction::forward, Direction::backward,
                                         Direction::average};

    try {
        for (std::size_t i = 0; i < dataset.positive.size(); ++i) {
            const ExampleSentence *row[3] = {&dataset.positive[i], &dataset.negative[i],
                                             &dataset.sister[i]};
            const int pattern_id = row[0]->pattern;
            if (row[1]->pattern != pattern_id || row[2]->pattern != pattern_id)
                throw std::invalid_argument("batch_extract: pattern mismatch at row " +
                                            std::to_string(i));
            if (pattern_id < 1 || pattern_id > 5)
                throw std::invalid_argument("batch_extract: pattern id out of range");
            const Pattern &pattern = pattern_by_id(pattern_id);
            const std::size_t pat = static_cast<std::size_t>(pattern_id - 1);

            TokenizedExample toks[3];
            bool all_accepted = true;
            for (int k = 0; k < 3; ++k) {
                auto result = tokenize_and_locate(*row[k], pattern, backend);
                auto &counts = report.per_set[row[k]->set_label];
                if (auto *tok = std::get_if<TokenizedExample>(&result)) {
                    ++counts.accepted[pat];
                    toks[k] = std::move(*tok);
                } else {
                    ++counts.rejected[pat];
                    all_accepted = false;
                }
            }
            // Keep only rows accepted in all three sets, so per-pattern
            // counts stay equal across the sets.
            if (!all_accepted) continue;
            ++report.kept_per_pattern[pat];

            for (int k = 0; k < 3; ++k) {
                AttentionTensor tensor = backend.attentions(row[k]->text);
                if (tensor.layers != backend.layers() || tensor.heads != backend.heads())
                    throw BackendError("backend returned unexpected tensor dimensions");
                const double err = tensor.max_row_sum_error();
                if (err > row_sum_tolerance)
                    throw BackendError("attention rows not stochastic (max error " +
                                       std::to_string(err) + ") for: " + row[k]->text);
                for (Direction d : directions) {
                    writer.append(extract_matrix(tensor, toks[k], d), row[k]->set_label,
                                  pattern_id);
                    ++report.matrices_written;
                }
            }
        }
    } catch (...) {
        writer.abort();
        throw;
    }

    writer.finalize();
    return report;
}

} // namespace taxoprobe
