#include "taxoprobe/backend.hpp"

#include "taxoprobe/tsv.hpp"
#include "taxoprobe/wordpiece.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <map>
#include <random>
#include <unordered_map>

namespace taxoprobe {

double AttentionTensor::max_row_sum_error() const {
    double worst = 0.0;
    for (std::uint32_t l = 0; l < layers; ++l) {
        for (std::uint32_t h = 0; h < heads; ++h) {
            for (std::uint32_t i = 0; i < seq_len; ++i) {
                double sum = 0.0;
                for (std::uint32_t j = 0; j < seq_len; ++j) sum += at(l, h, i, j);
                worst = std::max(worst, std::fabs(sum - 1.0));
            }
        }
    }
    return worst;
}

namespace {

// Plural surface forms a WordPiece model is known to break up; the stub
// mirrors those splits so split-token filtering is exercised end to end.
const std::map<std::string, std::vector<std::string>> &stub_split_vocab() {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"harmonicas", {"harmonica", "##s"}},
        {"grasshoppers", {"grass", "##hopper", "##s"}},
        {"harpoons", {"harp", "##oons"}},
        {"gophers", {"go", "##pher", "##s"}},
    };
    return table;
}

// Fills a tensor with normalized rows drawn from a generator seeded by
// (seed, text), so the result is a pure function of its inputs.
AttentionTensor random_stochastic_tensor(std::uint64_t seed, const std::string &text,
                                         std::uint32_t layers, std::uint32_t heads,
                                         std::uint32_t seq_len) {
    AttentionTensor t;
    t.layers = layers;
    t.heads = heads;
    t.seq_len = seq_len;
    t.values.resize(static_cast<std::size_t>(layers) * heads * seq_len * seq_len);

    const std::uint64_t text_hash = fnv1a64(text);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(text_hash),
                      static_cast<std::uint32_t>(text_hash >> 32)};
    std::mt19937_64 gen(seq);
    std::uniform_real_distribution<double> uniform(0.05, 1.0);

    std::vector<double> row(seq_len);
    for (std::uint32_t l = 0; l < layers; ++l) {
        for (std::uint32_t h = 0; h < heads; ++h) {
            for (std::uint32_t i = 0; i < seq_len; ++i) {
                double sum = 0.0;
                for (std::uint32_t j = 0; j < seq_len; ++j) {
                    row[j] = uniform(gen);
                    sum += row[j];
                }
                double float_sum = 0.0;
                for (std::uint32_t j = 0; j < seq_len; ++j) {
                    t.at(l, h, i, j) = static_cast<float>(row[j] / sum);
                    float_sum += t.at(l, h, i, j);
                }
                // push the float-rounded row sum back onto 1
                std::uint32_t jmax = 0;
                for (std::uint32_t j = 1; j < seq_len; ++j)
                    if (t.at(l, h, i, j) > t.at(l, h, i, jmax)) jmax = j;
                t.at(l, h, i, jmax) =
                    static_cast<float>(static_cast<double>(t.at(l, h, i, jmax)) - (float_sum - 1.0));
            }
        }
    }
    return t;
}

class StubBackend final : public ModelBackend {
public:
    StubBackend(std::uint64_t seed, std::uint32_t layers, std::uint32_t heads)
        : seed_(seed), layers_(layers), heads_(heads) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "stub:%llu", static_cast<unsigned long long>(seed));
        name_ = buf;
        tokenizer_id_ = "stub-whitespace";
    }

    const std::string &name() const override { return name_; }
    std::uint32_t layers() const override { return layers_; }
    std::uint32_t heads() const override { return heads_; }
    const std::string &tokenizer_id() const override { return tokenizer_id_; }

    std::vector<std::string> tokenize(const std::string &text) const override {
        std::vector<std::string> out;
        out.push_back("[CLS]");
        for (const std::string &word : WordPieceTokenizer::basic_split(text)) {
            auto it = stub_split_vocab().find(word);
            if (it != stub_split_vocab().end()) {
                out.insert(out.end(), it->second.begin(), it->second.end());
            } else {
                out.push_back(word);
            }
        }
        out.push_back("[SEP]");
        return out;
    }

    AttentionTensor attentions(const std::string &text) const override {
        const auto tokens = tokenize(text);
        return random_stochastic_tensor(seed_, text, layers_, heads_,
                                        static_cast<std::uint32_t>(tokens.size()));
    }

private:
    std::uint64_t seed_;
    std::uint32_t layers_;
    std::uint32_t heads_;
    std::string name_;
    std::string tokenizer_id_;
};

class WordPieceBackend final : public ModelBackend {
public:
    WordPieceBackend(const std::string &vocab_path, std::uint64_t seed, std::uint32_t layers,
                     std::uint32_t heads)
        : tokenizer_(vocab_path), seed_(seed), layers_(layers), heads_(heads) {
        name_ = "wordpiece:" + vocab_path;
    }

    const std::string &name() const override { return name_; }
    std::uint32_t layers() const override { return layers_; }
    std::uint32_t heads() const override { return heads_; }
    const std::string &tokenizer_id() const override { return tokenizer_.vocab_id(); }

    std::vector<std::string> tokenize(const std::string &text) const override {
        return tokenizer_.tokenize(text);
    }

    AttentionTensor attentions(const std::string &text) const override {
        const auto tokens = tokenize(text);
        return random_stochastic_tensor(seed_, text, layers_, heads_,
                                        static_cast<std::uint32_t>(tokens.size()));
    }

private:
    WordPieceTokenizer tokenizer_;
    std::uint64_t seed_;
    std::uint32_t layers_;
    std::uint32_t heads_;
    std::string name_;
};

constexpr char dump_magic[4] = {'A', 'T', 'N', 'D'};

class DumpBackend final : public ModelBackend {
public:
    explicit DumpBackend(const std::string &dir) : dir_(dir) {
        namespace fs = std::filesystem;
        const std::string index_path = (fs::path(dir) / "dump_index.tsv").string();
        const std::string bin_path = (fs::path(dir) / "dump_tensors.bin").string();
        if (!fs::exists(index_path) || !fs::exists(bin_path))
            throw BackendError("attention dump not found under " + dir);

        const auto lines = read_lines(index_path);
        if (lines.empty() || lines[0] != "text\tbyte_offset\ttokens")
            throw BackendError(index_path + ": bad dump index header");
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].empty()) continue;
            auto fields = split(lines[i], '\t');
            if (fields.size() != 3)
                throw BackendError(index_path + ":" + std::to_string(i + 1) +
                                   ": expected 3 fields");
            Entry e;
            std::uint64_t off = 0;
            auto [p, ec] =
                std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), off);
            if (ec != std::errc())
                throw BackendError(index_path + ":" + std::to_string(i + 1) + ": bad offset");
            e.offset = off;
            e.tokens = split(fields[2], ' ');
            entries_.emplace(fields[0], std::move(e));
        }
        if (entries_.empty()) throw BackendError(index_path + ": no entries");

        bin_ = std::fopen(bin_path.c_str(), "rb");
        if (!bin_) throw BackendError("cannot open " + bin_path);

        // model geometry from the first record
        AttentionTensor first = read_record(entries_.begin()->second.offset);
        layers_ = first.layers;
        heads_ = first.heads;

        name_ = "dump:" + dir;
        tokenizer_id_ = "dump:" + dir;
        const std::string meta_path = (fs::path(dir) / "dump_meta.json").string();
        if (fs::exists(meta_path)) {
            auto meta = nlohmann::json::parse(read_text_file(meta_path));
            if (meta.contains("model")) name_ = meta["model"].get<std::string>();
            if (meta.contains("tokenizer")) tokenizer_id_ = meta["tokenizer"].get<std::string>();
        }
    }

    ~DumpBackend() override {
        if (bin_) std::fclose(bin_);
    }

    const std::string &name() const override { return name_; }
    std::uint32_t layers() const override { return layers_; }
    std::uint32_t heads() const override { return heads_; }
    const std::string &tokenizer_id() const override { return tokenizer_id_; }

    std::vector<std::string> tokenize(const std::string &text) const override {
        return find(text).tokens;
    }

    AttentionTensor attentions(const std::string &text) const override {
        const Entry &e = find(text);
        AttentionTensor t = read_record(e.offset);
        if (t.seq_len != e.tokens.size())
            throw BackendError("dump record sequence length mismatch for: " + text);
        return t;
    }

private:
    struct Entry {
        std::uint64_t offset = 0;
        std::vector<std::string> tokens;
    };

    const Entry &find(const std::string &text) const {
        auto it = entries_.find(text);
        if (it == entries_.end())
            throw BackendError("sentence not present in attention dump: " + text);
        return it->second;
    }

    AttentionTensor read_record(std::uint64_t offset) const {
        if (std::fseek(bin_, static_cast<long>(offset), SEEK_SET) != 0)
            throw BackendError("dump seek failed");
        char magic[4];
        std::uint32_t dims[3];
        if (std::fread(magic, 1, 4, bin_) != 4 || std::memcmp(magic, dump_magic, 4) != 0)
            throw BackendError("bad dump record magic");
        if (std::fread(dims, sizeof(std::uint32_t), 3, bin_) != 3)
            throw BackendError("truncated dump record header");
        AttentionTensor t;
        t.layers = dims[0];
        t.heads = dims[1];
        t.seq_len = dims[2];
        const std::size_t n = static_cast<std::size_t>(t.layers) * t.heads * t.seq_len * t.seq_len;
        t.values.resize(n);
        if (std::fread(t.values.data(), sizeof(float), n, bin_) != n)
            throw BackendError("truncated dump record payload");
        return t;
    }

    std::string dir_;
    std::unordered_map<std::string, Entry> entries_;
    std::FILE *bin_ = nullptr;
    std::uint32_t layers_ = 0;
    std::uint32_t heads_ = 0;
    std::string name_;
    std::string tokenizer_id_;
};

std::uint64_t parse_seed(const std::string &s, std::uint64_t fallback) {
    if (s.empty()) return fallback;
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw BackendError("bad backend seed '" + s + "'");
    return v;
}

} // namespace

std::unique_ptr<ModelBackend> make_stub_backend(std::uint64_t seed, std::uint32_t layers,
                                                std::uint32_t heads) {
    return std::make_unique<StubBackend>(seed, layers, heads);
}

std::unique_ptr<ModelBackend> make_wordpiece_backend(const std::string &vocab_path,
                                                     std::uint64_t seed, std::uint32_t layers,
                                                     std::uint32_t heads) {
    return std::make_unique<WordPieceBackend>(vocab_path, seed, layers, heads);
}

std::unique_ptr<ModelBackend> make_dump_backend(const std::string &dir) {
    return std::make_unique<DumpBackend>(dir);
}

std::unique_ptr<ModelBackend> make_backend(const std::string &spec, std::uint64_t default_seed) {
    if (spec == "stub" || spec.rfind("stub:", 0) == 0) {
        const std::string arg = spec.size() > 5 ? spec.substr(5) : "";
        return make_stub_backend(parse_seed(arg, default_seed));
    }
    if (spec.rfind("wordpiece:", 0) == 0) {
        std::string rest = spec.substr(10);
        std::uint64_t seed = default_seed;
        auto colon = rest.rfind(':');
        // a trailing numeric component is a seed, not part of the path
        if (colon != std::string::npos && colon + 1 < rest.size() &&
            rest.find_first_not_of("0123456789", colon + 1) == std::string::npos) {
            seed = parse_seed(rest.substr(colon + 1), default_seed);
            rest = rest.substr(0, colon);
        }
        if (rest.empty()) throw BackendError("wordpiece backend needs a vocab path");
        return make_wordpiece_backend(rest, seed);
    }
    if (spec.rfind("dump:", 0) == 0) {
        const std::string dir = spec.substr(5);
        if (dir.empty()) throw BackendError("dump backend needs a directory");
        return make_dump_backend(dir);
    }
    throw BackendError("unknown backend spec '" + spec + "'");
}

} // namespace taxoprobe
