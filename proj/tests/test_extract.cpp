#include "taxoprobe/extract.hpp"
#include "taxoprobe/tsv.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace taxoprobe;
using namespace taxoprobe::testing;

namespace {

ExampleSentence make_example(int pattern_id, const std::string &hypo_raw,
                             const std::string &hyper_raw, std::uint64_t id = 0) {
    NounPair pair{hypo_raw, hyper_raw, SetLabel::positive, std::nullopt};
    return instantiate_pattern(pattern_by_id(pattern_id), pair, id);
}

AttentionTensor uniform_tensor(std::uint32_t layers, std::uint32_t heads, std::uint32_t seq) {
    AttentionTensor t;
    t.layers = layers;
    t.heads = heads;
    t.seq_len = seq;
    t.values.assign(static_cast<std::size_t>(layers) * heads * seq * seq,
                    1.0f / static_cast<float>(seq));
    return t;
}

} // namespace

TEST_SUITE("extract") {

TEST_CASE("the five published example sentences resolve to the published positions") {
    const auto backend = make_stub_backend(7);
    struct Case {
        int pattern;
        std::string hypo, hyper;
        std::size_t source, target_from_end;
    };
    // (1,-3) (2,-3) (3,-3) (2,-8) (3,-3), counted with markers included
    const Case cases[] = {
        {1, "alligator", "reptile", 1, 3},
        {2, "hammer", "tool", 2, 3},
        {3, "hawk", "predator", 3, 3},
        {4, "pear", "fruit", 2, 8},
        {5, "cherry", "fruit", 3, 3},
    };
    for (const auto &c : cases) {
        const auto ex = make_example(c.pattern, c.hypo, c.hyper);
        const auto result = tokenize_and_locate(ex, pattern_by_id(c.pattern), *backend);
        const auto *tok = std::get_if<TokenizedExample>(&result);
        REQUIRE_MESSAGE(tok != nullptr, ex.text);
        CHECK(tok->source_pos == c.source);
        CHECK(tok->target_pos == tok->tokens.size() - c.target_from_end);
        CHECK(to_lower(tok->tokens[tok->source_pos]) == to_lower(ex.hyponym));
        CHECK(to_lower(tok->tokens[tok->target_pos]) == to_lower(ex.hypernym));
        CHECK(tok->tokens.front() == "[CLS]");
        CHECK(tok->tokens.back() == "[SEP]");
    }
}

TEST_CASE("pattern 1 example: alligators at 1, reptiles at len-3") {
    const auto backend = make_stub_backend(7);
    const auto ex = make_example(1, "alligator", "reptile");
    CHECK(ex.text == "alligators are reptiles.");
    const auto result = tokenize_and_locate(ex, pattern_by_id(1), *backend);
    const auto &tok = std::get<TokenizedExample>(result);
    // [CLS] alligators are reptiles . [SEP]
    CHECK(tok.tokens.size() == 6);
    CHECK(tok.source_pos == 1);
    CHECK(tok.target_pos == 3);
}

TEST_CASE("split hyponym is rejected with the split-token reason") {
    const auto backend = make_stub_backend(7);
    // the stub splits 'harmonicas' the way the published tokenization shows
    ExampleSentence ex;
    ex.id = 1;
    ex.pattern = 1;
    ex.text = "harmonicas are instruments.";
    ex.hyponym = "harmonicas";
    ex.hypernym = "instruments";
    const auto result = tokenize_and_locate(ex, pattern_by_id(1), *backend);
    const auto *rejection = std::get_if<Rejection>(&result);
    REQUIRE(rejection != nullptr);
    CHECK(rejection->reason == "split-token");
}

TEST_CASE("stub tokenizer reproduces the published split examples") {
    const auto backend = make_stub_backend(0);
    using V = std::vector<std::string>;
    CHECK(backend->tokenize("clocks are watches.") ==
          V{"[CLS]", "clocks", "are", "watches", ".", "[SEP]"});
    CHECK(backend->tokenize("harmonicas are musical instruments.") ==
          V{"[CLS]", "harmonica", "##s", "are", "musical", "instruments", ".", "[SEP]"});
    CHECK(backend->tokenize("grasshoppers are insects.") ==
          V{"[CLS]", "grass", "##hopper", "##s", "are", "insects", ".", "[SEP]"});
    CHECK(backend->tokenize("harpoons are weapons.") ==
          V{"[CLS]", "harp", "##oons", "are", "weapons", ".", "[SEP]"});
    CHECK(backend->tokenize("gophers are animals.") ==
          V{"[CLS]", "go", "##pher", "##s", "are", "animals", ".", "[SEP]"});
}

TEST_CASE("uniform tensor yields constant matrices in all directions") {
    const auto t = uniform_tensor(2, 3, 6);
    TokenizedExample tok;
    tok.tokens = {"[CLS]", "a", "b", "c", "d", "[SEP]"};
    tok.source_pos = 1;
    tok.target_pos = 3;
    for (Direction d : {Direction::forward, Direction::backward, Direction::average}) {
        const auto m = extract_matrix(t, tok, d);
        REQUIRE(m.values.size() == 6);
        for (float v : m.values) CHECK(v == doctest::Approx(1.0f / 6.0f).epsilon(1e-9));
    }
}

TEST_CASE("delta tensor produces a one-hot forward matrix") {
    auto t = uniform_tensor(2, 2, 4);
    for (auto &v : t.values) v = 0.0f;
    // row-stochastic: every query attends somewhere
    for (std::uint32_t l = 0; l < 2; ++l)
        for (std::uint32_t h = 0; h < 2; ++h)
            for (std::uint32_t i = 0; i < 4; ++i) t.at(l, h, i, 0) = 1.0f;
    TokenizedExample tok;
    tok.tokens = {"[CLS]", "x", "y", "[SEP]"};
    tok.source_pos = 1;
    tok.target_pos = 2;
    // move the mass to (source,target) for exactly one head
    t.at(1, 0, 1, 0) = 0.0f;
    t.at(1, 0, 1, 2) = 1.0f;
    const auto m = extract_matrix(t, tok, Direction::forward);
    CHECK(m.at(1, 0) == 1.0f);
    CHECK(m.at(0, 0) == 0.0f);
    CHECK(m.at(0, 1) == 0.0f);
    CHECK(m.at(1, 1) == 0.0f);
}

TEST_CASE("average direction equals the elementwise mean of forward and backward") {
    const auto backend = make_stub_backend(11);
    const std::string text = "ravens are birds.";
    const auto tensor = backend->attentions(text);
    TokenizedExample tok;
    tok.tokens = backend->tokenize(text);
    tok.source_pos = 1;
    tok.target_pos = 3;
    const auto fwd = extract_matrix(tensor, tok, Direction::forward);
    const auto bwd = extract_matrix(tensor, tok, Direction::backward);
    const auto avg = extract_matrix(tensor, tok, Direction::average);
    for (std::size_t i = 0; i < avg.values.size(); ++i) {
        const double oracle =
            (static_cast<double>(fwd.values[i]) + static_cast<double>(bwd.values[i])) * 0.5;
        CHECK(std::fabs(static_cast<double>(avg.values[i]) - oracle) <= 1e-12);
    }
}

TEST_CASE("positions outside the tensor raise") {
    const auto t = uniform_tensor(1, 1, 3);
    TokenizedExample tok;
    tok.tokens = {"[CLS]", "x", "[SEP]", "extra"};
    tok.source_pos = 3;
    tok.target_pos = 1;
    CHECK_THROWS_AS(extract_matrix(t, tok, Direction::forward), std::out_of_range);
}

TEST_CASE("stub backend is deterministic per (seed, input) and varies across seeds") {
    const auto a1 = make_stub_backend(5)->attentions("that hammer is a tool.");
    const auto a2 = make_stub_backend(5)->attentions("that hammer is a tool.");
    CHECK(a1.values == a2.values); // bit-identical

    const auto b = make_stub_backend(6)->attentions("that hammer is a tool.");
    CHECK(a1.values != b.values);

    const auto other = make_stub_backend(5)->attentions("that pear is a fruit.");
    CHECK(a1.values != other.values);
}

TEST_CASE("stub attention rows sum to one") {
    const auto t = make_stub_backend(3)->attentions("I like hawks and other predators.");
    CHECK(t.max_row_sum_error() <= 1e-6);
}

TEST_CASE("batch_extract keeps only rows accepted in all three sets") {
    TempDir dir("store");
    const auto backend = make_stub_backend(1);

    DatasetTriple ds;
    std::uint64_t id = 0;
    auto add_row = [&](int pattern, const std::string &hypo, const std::string &pos_hyper,
                       const std::string &neg_hyper, const std::string &sis_hyper) {
        ds.positive.push_back(make_example(pattern, hypo, pos_hyper, id++));
        auto neg = make_example(pattern, hypo, neg_hyper, id++);
        neg.set_label = SetLabel::negative;
        ds.negative.push_back(neg);
        auto sis = make_example(pattern, hypo, sis_hyper, id++);
        sis.set_label = SetLabel::sister;
        ds.sister.push_back(sis);
    };
    add_row(1, "raven", "bird", "person", "crow");
    add_row(2, "raven", "bird", "person", "crow");
    // 'harpoons' splits: pattern 1 pluralizes the filler, so the sister
    // column is rejected and the whole row must be dropped everywhere
    add_row(1, "whale", "mammal", "tool", "harpoon");
    // pattern 2 keeps the filler singular; 'harpoon' alone does not split
    add_row(2, "whale", "mammal", "tool", "harpoon");

    const auto report = batch_extract(ds, *backend, dir.file("m"));
    CHECK(report.kept_per_pattern[0] == 1); // pattern 1: only the raven row
    CHECK(report.kept_per_pattern[1] == 2); // pattern 2: both rows
    CHECK(report.per_set.at(SetLabel::sister).rejected[0] == 1);
    CHECK(report.per_set.at(SetLabel::positive).accepted[0] == 2);
    // 3 kept rows x 3 sets x 3 directions
    CHECK(report.matrices_written == 27);

    MatrixStoreReader reader(dir.file("m"));
    CHECK(reader.entries().size() == 27);
    // cross-set equality after intersection
    for (int pattern : {1, 2}) {
        const auto pos = reader.select(SetLabel::positive, pattern, Direction::forward).size();
        const auto neg = reader.select(SetLabel::negative, pattern, Direction::forward).size();
        const auto sis = reader.select(SetLabel::sister, pattern, Direction::forward).size();
        CHECK(pos == neg);
        CHECK(pos == sis);
    }
}

TEST_CASE("batch_extract on empty input writes an empty store and zero counts") {
    TempDir dir("store");
    const auto backend = make_stub_backend(1);
    const auto report = batch_extract(DatasetTriple{}, *backend, dir.file("m"));
    CHECK(report.matrices_written == 0);
    for (const auto &[label, counts] : report.per_set) {
        for (std::size_t p = 0; p < 5; ++p) {
            CHECK(counts.accepted[p] == 0);
            CHECK(counts.rejected[p] == 0);
        }
    }
    MatrixStoreReader reader(dir.file("m"));
    CHECK(reader.entries().empty());
}

TEST_CASE("ten accepted examples produce thirty matrices") {
    TempDir dir("store");
    const auto backend = make_stub_backend(2);
    DatasetTriple ds;
    std::uint64_t id = 0;
    const char *animals[] = {"raven", "crow", "hawk", "heron", "finch",
                             "stork", "robin", "wren", "swift", "crane"};
    for (const char *animal : animals) {
        ds.positive.push_back(make_example(1, animal, "bird", id++));
        auto neg = make_example(1, animal, "person", id++);
        neg.set_label = SetLabel::negative;
        ds.negative.push_back(neg);
        auto sis = make_example(1, animal, "gull", id++);
        sis.set_label = SetLabel::sister;
        ds.sister.push_back(sis);
    }
    const auto report = batch_extract(ds, *backend, dir.file("m"));
    CHECK(report.kept_per_pattern[0] == 10);
    CHECK(report.matrices_written == 90); // 10 rows x 3 sets x 3 directions

    // per set: 10 examples x 3 directions = 30 matrices
    MatrixStoreReader reader(dir.file("m"));
    CHECK(reader.select(SetLabel::positive, std::nullopt, std::nullopt).size() == 30);
}

TEST_CASE("a failing backend aborts the store and leaves the partial marker") {
    class FailingBackend final : public ModelBackend {
    public:
        const std::string &name() const override { return name_; }
        std::uint32_t layers() const override { return 2; }
        std::uint32_t heads() const override { return 2; }
        const std::string &tokenizer_id() const override { return name_; }
        std::vector<std::string> tokenize(const std::string &text) const override {
            return make_stub_backend(0)->tokenize(text);
        }
        AttentionTensor attentions(const std::string &) const override {
            throw BackendError("backend went away");
        }

    private:
        std::string name_ = "failing";
    };

    TempDir dir("store");
    DatasetTriple ds;
    ds.positive.push_back(make_example(1, "raven", "bird", 0));
    auto neg = make_example(1, "raven", "person", 1);
    neg.set_label = SetLabel::negative;
    ds.negative.push_back(neg);
    auto sis = make_example(1, "raven", "crow", 2);
    sis.set_label = SetLabel::sister;
    ds.sister.push_back(sis);

    FailingBackend backend;
    CHECK_THROWS_AS(batch_extract(ds, backend, dir.file("m")), BackendError);
    CHECK(store_is_partial(dir.file("m")));
    CHECK_THROWS_AS(MatrixStoreReader(dir.file("m")), StoreError);
}

TEST_CASE("wordpiece backend tokenizes against a vocab file") {
    TempDir dir("wp");
    write_text_file(dir.file("vocab.txt"),
                    "[PAD]\n[UNK]\n[CLS]\n[SEP]\nalligators\nare\nreptiles\n.\nharmonica\n"
                    "##s\nmusical\ninstruments\n");
    const auto backend = make_wordpiece_backend(dir.file("vocab.txt"), 0);
    using V = std::vector<std::string>;
    CHECK(backend->tokenize("alligators are reptiles.") ==
          V{"[CLS]", "alligators", "are", "reptiles", ".", "[SEP]"});
    CHECK(backend->tokenize("harmonicas are musical instruments.") ==
          V{"[CLS]", "harmonica", "##s", "are", "musical", "instruments", ".", "[SEP]"});
    CHECK(backend->tokenize("Alligators ARE reptiles.") ==
          V{"[CLS]", "alligators", "are", "reptiles", ".", "[SEP]"}); // uncased
    CHECK(backend->tokenize("zzz are reptiles.") ==
          V{"[CLS]", "[UNK]", "are", "reptiles", ".", "[SEP]"});
}

TEST_CASE("dump backend replays stored tokens and tensors") {
    TempDir dir("dump");
    // one record, written in the documented layout
    const std::string text = "ravens are birds.";
    const std::vector<std::string> tokens = {"[CLS]", "ravens", "are", "birds", ".", "[SEP]"};
    AttentionTensor t = make_stub_backend(9)->attentions(text);

    std::string bin;
    bin.append("ATND", 4);
    const std::uint32_t dims[3] = {t.layers, t.heads, t.seq_len};
    bin.append(reinterpret_cast<const char *>(dims), sizeof dims);
    bin.append(reinterpret_cast<const char *>(t.values.data()), t.values.size() * sizeof(float));
    write_text_file(dir.file("dump_tensors.bin"), bin);
    write_text_file(dir.file("dump_index.tsv"),
                    "text\tbyte_offset\ttokens\n" + text + "\t0\t" + join(tokens, ' ') + "\n");

    const auto backend = make_dump_backend(dir.path().string());
    CHECK(backend->layers() == t.layers);
    CHECK(backend->tokenize(text) == tokens);
    CHECK(backend->attentions(text).values == t.values);
    CHECK_THROWS_AS(backend->attentions("unknown sentence"), BackendError);
}

} // TEST_SUITE
