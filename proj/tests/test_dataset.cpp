#include "taxoprobe/dataset.hpp"
#include "taxoprobe/tsv.hpp"

#include "support/fixtures.hpp"

#include <doctest.h>

#include <set>

using namespace taxoprobe;
using namespace taxoprobe::testing;

namespace {

LexicalDatabase paper_db(const TempDir &dir) {
    write_text_file(dir.file("lexicon.tsv"), paper_taxonomy_tsv());
    return load_wordnet(dir.file("lexicon.tsv"));
}

NounPair positive_pair(const std::string &hypo, const std::string &hyper) {
    return {hypo, hyper, SetLabel::positive, std::nullopt};
}

} // namespace

TEST_SUITE("dataset") {

TEST_CASE("the five pattern templates match the published table verbatim") {
    const auto &p = patterns();
    CHECK(p[0].template_text == "[hypo]s are [hyper]s.");
    CHECK(p[1].template_text == "That [hypo] is [a(n)] [hyper].");
    CHECK(p[2].template_text == "I like [hypo]s and other [hyper]s.");
    CHECK(p[3].template_text == "The [hypo], which was the largest [hyper] among them, stood out.");
    CHECK(p[4].template_text == "I like [hypo]s, particularly because they are [hyper]s.");
}

TEST_CASE("token index pairs follow the published per-pattern table") {
    const int expected[5][2] = {{1, -3}, {2, -3}, {3, -3}, {2, -8}, {3, -3}};
    for (int i = 0; i < 5; ++i) {
        CHECK(patterns()[i].source_index == expected[i][0]);
        CHECK(patterns()[i].target_index == expected[i][1]);
    }
}

TEST_CASE("instantiation reproduces the published example sentences") {
    CHECK(instantiate_pattern(pattern_by_id(1), positive_pair("alligator", "reptile"), 0).text ==
          "alligators are reptiles.");
    CHECK(instantiate_pattern(pattern_by_id(2), positive_pair("hammer", "tool"), 0).text ==
          "That hammer is a tool.");
    CHECK(instantiate_pattern(pattern_by_id(3), positive_pair("hawk", "predator"), 0).text ==
          "I like hawks and other predators.");
    CHECK(instantiate_pattern(pattern_by_id(4), positive_pair("pear", "fruit"), 0).text ==
          "The pear, which was the largest fruit among them, stood out.");
    // naive pluralization and the uninflected pattern-5 hypernym slot
    CHECK(instantiate_pattern(pattern_by_id(5), positive_pair("cherry", "fruit"), 0).text ==
          "I like cherrys, particularly because they are fruit.");
    CHECK(instantiate_pattern(pattern_by_id(3), positive_pair("raven", "animal"), 0).text ==
          "I like ravens and other animals.");
}

TEST_CASE("determiner is 'an' before vowel-initial fillers") {
    CHECK(instantiate_pattern(pattern_by_id(2), positive_pair("apple", "fruit"), 0).text ==
          "That apple is a fruit.");
    CHECK(instantiate_pattern(pattern_by_id(2), positive_pair("raven", "animal"), 0).text ==
          "That raven is an animal.");
}

TEST_CASE("instantiated surface forms land in the declared fields") {
    const auto ex = instantiate_pattern(pattern_by_id(5), positive_pair("cherry", "fruit"), 7);
    CHECK(ex.id == 7);
    CHECK(ex.pattern == 5);
    CHECK(ex.hyponym == "cherrys");
    CHECK(ex.hypernym == "fruit");
    CHECK(ex.hyponym_raw == "cherry");
    CHECK(ex.hypernym_raw == "fruit");
}

TEST_CASE("multi-word fillers are rejected") {
    CHECK_THROWS_AS(
        instantiate_pattern(pattern_by_id(1), positive_pair("rocking_chair", "furniture"), 0),
        std::invalid_argument);
    CHECK_THROWS_AS(
        instantiate_pattern(pattern_by_id(1), positive_pair("harmonica", "musical instrument"), 0),
        std::invalid_argument);
}

TEST_CASE("load_feature_norms parses rows and reports malformed input") {
    TempDir dir("norms");
    write_text_file(dir.file("norms.tsv"),
                    "concept\tfeature\trelation\nraven\tanimal\tsuperordinate\n");
    const auto norms = load_feature_norms(dir.file("norms.tsv"));
    REQUIRE(norms.size() == 1);
    CHECK(norms[0].concept_name == "raven");
    CHECK(norms[0].feature == "animal");
    CHECK(norms[0].relation == "superordinate");

    write_text_file(dir.file("header_only.tsv"), "concept\tfeature\trelation\n");
    CHECK(load_feature_norms(dir.file("header_only.tsv")).empty());

    write_text_file(dir.file("short_row.tsv"), "concept\tfeature\trelation\nraven\tanimal\n");
    CHECK_THROWS_WITH_AS(load_feature_norms(dir.file("short_row.tsv")),
                         doctest::Contains("row 1"), ParseError);

    write_text_file(dir.file("no_col.tsv"), "concept\tfeature\nx\ty\n");
    CHECK_THROWS_AS(load_feature_norms(dir.file("no_col.tsv")), ParseError);
}

TEST_CASE("custom column names and delimiters are honored") {
    TempDir dir("norms");
    write_text_file(dir.file("mcrae.csv"),
                    "Concept,Feature,BR_Label\nraven,a_bird,superordinate\n");
    NormsColumns cols;
    cols.concept_col = "Concept";
    cols.feature_col = "Feature";
    cols.relation_col = "BR_Label";
    cols.delimiter = ',';
    const auto norms = load_feature_norms(dir.file("mcrae.csv"), cols);
    REQUIRE(norms.size() == 1);
    CHECK(norms[0].feature == "a_bird");
}

TEST_CASE("positive pairs keep every superordinate reading and drop the rest") {
    const std::vector<NormTriple> norms = {
        {"raven", "bird", "superordinate"},
        {"raven", "animal", "Superordinate"}, // case-insensitive label
        {"raven", "feathers", "part"},
        {"raven", "bird", "superordinate"}, // duplicate
    };
    const auto pairs = extract_positive_pairs(norms);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].hypernym_raw == "bird");
    CHECK(pairs[1].hypernym_raw == "animal");
    CHECK(pairs[0].set_label == SetLabel::positive);
}

TEST_CASE("determiner prefixes of norm features are stripped") {
    const auto pairs = extract_positive_pairs({{"raven", "a_bird", "superordinate"},
                                               {"raven", "an_animal", "superordinate"},
                                               {"anteater", "animal", "superordinate"}});
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0].hypernym_raw == "bird");
    CHECK(pairs[1].hypernym_raw == "animal");
    CHECK(pairs[2].hyponym_raw == "anteater"); // only the feature is stripped
}

TEST_CASE("negative pair mirrors the published raven example") {
    TempDir dir("lex");
    const auto db = paper_db(dir);
    const auto neg = build_negative_pair(positive_pair("raven", "animal"), db);
    REQUIRE(neg.has_value());
    CHECK(neg->hyponym_raw == "raven");
    CHECK(neg->hypernym_raw == "person");
    CHECK(neg->set_label == SetLabel::negative);
    REQUIRE(neg->origin.has_value());
    CHECK(neg->origin->second == "animal");
}

TEST_CASE("negative pair respects the hypernym closure exclusion") {
    TempDir dir("lex");
    const auto db = paper_db(dir);
    // sisters of bird are reptile and mammal; mammal wins on tag count
    const auto neg = build_negative_pair(positive_pair("raven", "bird"), db);
    REQUIRE(neg.has_value());
    CHECK(neg->hypernym_raw == "mammal");

    // exhaustive enumeration oracle: no sister of any matched hypernym
    // synset with a higher count was skippable
    const auto closure_free = std::set<std::string>{"reptile", "mammal"};
    CHECK(closure_free.count(neg->hypernym_raw) == 1);
}

TEST_CASE("negative pair is none when the hypernym has no sisters") {
    TempDir dir("lex");
    const auto db = paper_db(dir);
    // entity is the root: organism's hypernym has no sisters
    CHECK_FALSE(build_negative_pair(positive_pair("organism", "entity"), db).has_value());
    // pairs that never map to synsets also yield none
    CHECK_FALSE(build_negative_pair(positive_pair("raven", "plant"), db).has_value());
}

TEST_CASE("sister pair mirrors the published raven example") {
    TempDir dir("lex");
    const auto db = paper_db(dir);
    const auto sis = build_sister_pair(positive_pair("raven", "bird"), db);
    REQUIRE(sis.has_value());
    CHECK(sis->hyponym_raw == "raven");
    CHECK(sis->hypernym_raw == "crow"); // crow:18 beats hawk:14
    CHECK(sis->set_label == SetLabel::sister);
}

TEST_CASE("sister pair picks the higher-count candidate") {
    TempDir dir("lex");
    write_text_file(dir.file("lexicon.tsv"),
                    "top\t\ttop:1\n"
                    "p\ttop\tparent:5\n"
                    "x\tp\ttarget:2\n"
                    "y\tp\tcandya:10\n"
                    "z\tp\tcandyb:3\n");
    const auto db = load_wordnet(dir.file("lexicon.tsv"));
    const auto sis = build_sister_pair(positive_pair("target", "parent"), db);
    REQUIRE(sis.has_value());
    CHECK(sis->hypernym_raw == "candya");
}

TEST_CASE("sister pair is none for an only child") {
    TempDir dir("lex");
    write_text_file(dir.file("lexicon.tsv"),
                    "top\t\ttop:1\n"
                    "p\ttop\tparent:5\n"
                    "x\tp\tlonely:2\n");
    const auto db = load_wordnet(dir.file("lexicon.tsv"));
    CHECK_FALSE(build_sister_pair(positive_pair("lonely", "parent"), db).has_value());
}

TEST_CASE("build_all aligns the three sets and numbers ids consecutively") {
    TempDir dir("lex");
    const auto db = paper_db(dir);
    const auto norms = load_feature_norms([&] {
        write_text_file(dir.file("norms.tsv"), paper_norms_tsv());
        return dir.file("norms.tsv");
    }());

    BuildReport report;
    const auto ds = build_all(norms, db, &report);

    // (raven,bird), (raven,animal), (alligator,reptile) are usable;
    // (organism,entity) lacks a negative and is dropped everywhere
    CHECK(report.positive_pairs == 4);
    CHECK(report.usable_pairs == 3);
    CHECK(report.dropped_no_negative == 1);
    CHECK(ds.positive.size() == 15);
    CHECK(ds.negative.size() == 15);
    CHECK(ds.sister.size() == 15);

    std::set<std::uint64_t> ids;
    for (const auto *set : {&ds.positive, &ds.negative, &ds.sister}) {
        for (const auto &ex : *set) ids.insert(ex.id);
    }
    CHECK(ids.size() == 45);
    CHECK(*ids.begin() == 0);
    CHECK(*ids.rbegin() == 44);

    for (std::size_t i = 0; i < ds.positive.size(); ++i) {
        CHECK(ds.positive[i].pattern == ds.negative[i].pattern);
        CHECK(ds.positive[i].pattern == ds.sister[i].pattern);
        CHECK(ds.positive[i].hyponym_raw == ds.negative[i].hyponym_raw);
        CHECK(ds.positive[i].hyponym_raw == ds.sister[i].hyponym_raw);
    }

    // no organism sentence anywhere
    for (const auto *set : {&ds.positive, &ds.negative, &ds.sister}) {
        for (const auto &ex : *set) CHECK(ex.hyponym_raw != "organism");
    }
}

TEST_CASE("counterfactual fillers hold the invariants, re-verified against the lexicon") {
    TempDir dir("lex");
    const auto db = paper_db(dir);
    write_text_file(dir.file("norms.tsv"), paper_norms_tsv());
    const auto norms = load_feature_norms(dir.file("norms.tsv"));
    const auto ds = build_all(norms, db, nullptr);

    for (std::size_t i = 0; i < ds.negative.size(); ++i) {
        const auto &neg = ds.negative[i];
        // the filler must not be a hypernym of any sense of the hyponym
        std::set<SynsetId> hypernyms;
        for (const auto *syn : db.synsets_of(neg.hyponym_raw)) {
            for (const auto &up : hypernym_closure(db, syn->id)) hypernyms.insert(up);
        }
        for (const auto *filler_syn : db.synsets_of(neg.hypernym_raw)) {
            CHECK(hypernyms.count(filler_syn->id) == 0);
        }

        // the sister filler must share a parent with some sense of the hyponym
        const auto &sis = ds.sister[i];
        bool shares_parent = false;
        for (const auto *syn : db.synsets_of(sis.hyponym_raw)) {
            for (const auto &sister_id : sister_terms(db, syn->id)) {
                for (const auto &lemma : db.get(sister_id).lemmas) {
                    if (to_lower(lemma.form) == sis.hypernym_raw) shares_parent = true;
                }
            }
        }
        CHECK(shares_parent);
    }
}

TEST_CASE("two usable pairs produce ten sentences per set") {
    TempDir dir("lex");
    const auto db = paper_db(dir);
    const std::vector<NormTriple> norms = {{"raven", "bird", "superordinate"},
                                           {"alligator", "reptile", "superordinate"}};
    const auto ds = build_all(norms, db, nullptr);
    CHECK(ds.positive.size() == 10);
    CHECK(ds.negative.size() == 10);
    CHECK(ds.sister.size() == 10);
}

TEST_CASE("export produces header plus one row per example and round-trips") {
    TempDir dir("tsv");
    const auto ex = instantiate_pattern(pattern_by_id(1), positive_pair("raven", "bird"), 0);
    export_tsv({ex}, dir.file("one.tsv"), SetLabel::positive);
    CHECK(read_lines(dir.file("one.tsv")).size() == 2);

    // export -> import -> export is byte-identical
    TempDir dir2("tsv2");
    const auto db = paper_db(dir2);
    write_text_file(dir2.file("norms.tsv"), paper_norms_tsv());
    const auto ds = build_all(load_feature_norms(dir2.file("norms.tsv")), db, nullptr);
    export_tsv(ds.positive, dir2.file("a.tsv"), SetLabel::positive);
    const auto back = import_tsv(dir2.file("a.tsv"), SetLabel::positive);
    export_tsv(back, dir2.file("b.tsv"), SetLabel::positive);
    CHECK(read_text_file(dir2.file("a.tsv")) == read_text_file(dir2.file("b.tsv")));

    CHECK_THROWS_AS(export_tsv({}, dir.file("empty.tsv"), SetLabel::positive),
                    std::invalid_argument);
}

} // TEST_SUITE
