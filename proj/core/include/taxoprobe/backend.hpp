#pragma once

#include "taxoprobe/attention.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace taxoprobe {

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tokenizer plus attention source. Implementations must be deterministic:
// the same input always yields the same tokens and tensor, independent of
// call order, so extraction can be parallelized per example.
class ModelBackend {
public:
    virtual ~ModelBackend() = default;

    virtual const std::string &name() const = 0;
    virtual std::uint32_t layers() const = 0;
    virtual std::uint32_t heads() const = 0;
    virtual const std::string &tokenizer_id() const = 0;

    // Tokens include the begin marker at index 0 and the end marker last.
    virtual std::vector<std::string> tokenize(const std::string &text) const = 0;

    virtual AttentionTensor attentions(const std::string &text) const = 0;
};

// Deterministic pseudo-random backend. Splits only the words of a fixed
// small vocabulary (mirroring known plural splits of a WordPiece model);
// everything else tokenizes by whitespace and punctuation, lowercased.
// Attention rows are drawn from a generator seeded by (seed, text) and
// normalized, so output is independent of evaluation order.
std::unique_ptr<ModelBackend> make_stub_backend(std::uint64_t seed,
                                                std::uint32_t layers = 12,
                                                std::uint32_t heads = 12);

// WordPiece tokenizer over a vocab file (one token per line, `##`
// continuations, uncased), paired with stub attentions for pipeline runs
// that only need faithful tokenization.
std::unique_ptr<ModelBackend> make_wordpiece_backend(const std::string &vocab_path,
                                                     std::uint64_t seed,
                                                     std::uint32_t layers = 12,
                                                     std::uint32_t heads = 12);

// Precomputed attention dump produced by an external model runner
// (tools/dump_attentions.py writes this layout). Keyed by exact sentence
// text:
//   <dir>/dump_index.tsv   text <TAB> byte_offset  (tokens tab 3: space-joined)
//   <dir>/dump_tensors.bin per record: magic "ATND", u32 L, H, S, then
//                          L*H*S*S little-endian float32
std::unique_ptr<ModelBackend> make_dump_backend(const std::string &dir);

// Parses a backend spec string: "stub[:seed]", "wordpiece:<vocab>[:seed]",
// "dump:<dir>". `default_seed` applies when the spec omits one.
std::unique_ptr<ModelBackend> make_backend(const std::string &spec, std::uint64_t default_seed);

} // namespace taxoprobe
