#include "taxoprobe/dataset.hpp"

#include "taxoprobe/tsv.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace taxoprobe {

const char *to_string(SetLabel label) {
    switch (label) {
    case SetLabel::positive: return "positive";
    case SetLabel::negative: return "negative";
    case SetLabel::sister: return "sister";
    }
    return "?";
}

SetLabel set_label_from_string(const std::string &s) {
    if (s == "positive") return SetLabel::positive;
    if (s == "negative") return SetLabel::negative;
    if (s == "sister" || s == "sisters") return SetLabel::sister;
    throw std::invalid_argument("unknown set label '" + s + "'");
}

const std::array<Pattern, 5> &patterns() {
    static const std::array<Pattern, 5> table = {{
        {1, "[hypo]s are [hyper]s.", true, true, false, 1, -3},
        {2, "That [hypo] is [a(n)] [hyper].", false, false, true, 2, -3},
        {3, "I like [hypo]s and other [hyper]s.", true, true, false, 3, -3},
        {4, "The [hypo], which was the largest [hyper] among them, stood out.", false, false,
         false, 2, -8},
        // The hypernym slot of pattern 5 stays in base form; the published
        // examples read "... because they are fruit."
        {5, "I like [hypo]s, particularly because they are [hyper]s.", true, false, false, 3, -3},
    }};
    return table;
}

const Pattern &pattern_by_id(int id) {
    if (id < 1 || id > 5) throw std::out_of_range("pattern id out of range: " + std::to_string(id));
    return patterns()[static_cast<std::size_t>(id - 1)];
}

namespace {

bool is_multiword(const std::string &s) {
    return s.find('_') != std::string::npos || s.find(' ') != std::string::npos;
}

std::string strip_determiner_prefix(const std::string &feature) {
    if (feature.rfind("a_", 0) == 0) return feature.substr(2);
    if (feature.rfind("an_", 0) == 0) return feature.substr(3);
    return feature;
}

bool synset_has_lemma(const Synset &s, const std::string &lemma_lower) {
    for (const auto &lemma : s.lemmas) {
        if (to_lower(lemma.form) == lemma_lower) return true;
    }
    return false;
}

// Step 1 of the counterfactual procedure: synset pairs (hypo, hyper) where
// the hyper synset is a direct or inherited hypernym of the hypo synset.
std::vector<std::pair<SynsetId, SynsetId>> hypernym_synset_pairs(const NounPair &pair,
                                                                 const LexicalDatabase &db) {
    std::vector<std::pair<SynsetId, SynsetId>> out;
    const auto hypo_synsets = db.synsets_of(pair.hyponym_raw);
    const auto hyper_synsets = db.synsets_of(pair.hypernym_raw);
    for (const Synset *hypo : hypo_synsets) {
        const auto closure = hypernym_closure(db, hypo->id);
        const std::set<SynsetId> closure_set(closure.begin(), closure.end());
        for (const Synset *hyper : hyper_synsets) {
            if (closure_set.count(hyper->id)) out.emplace_back(hypo->id, hyper->id);
        }
    }
    return out;
}

// Everything that IS a hypernym of the concept, over all of its synsets.
std::set<SynsetId> full_hypernym_closure(const std::string &lemma, const LexicalDatabase &db) {
    std::set<SynsetId> out;
    for (const Synset *s : db.synsets_of(lemma)) {
        for (auto &id : hypernym_closure(db, s->id)) out.insert(id);
    }
    return out;
}

} // namespace

std::vector<NounPair> extract_positive_pairs(const std::vector<NormTriple> &norms) {
    std::vector<NounPair> out;
    std::unordered_set<std::string> seen;
    for (const auto &triple : norms) {
        if (to_lower(triple.relation) != "superordinate") continue;
        const std::string hypo = to_lower(triple.concept_name);
        const std::string hyper = strip_determiner_prefix(to_lower(triple.feature));
        if (hypo.empty() || hyper.empty() || hypo == hyper) continue;
        if (!seen.insert(hypo + "\t" + hyper).second) continue;
        out.push_back({hypo, hyper, SetLabel::positive, std::nullopt});
    }
    return out;
}

std::optional<NounPair> build_negative_pair(const NounPair &pair, const LexicalDatabase &db) {
    const auto step1 = hypernym_synset_pairs(pair, db);
    if (step1.empty()) return std::nullopt;

    // Exclude anything that is a hypernym of ANY sense of the hyponym, so
    // the filler is guaranteed not to be a hypernym of the target concept.
    const auto excluded = full_hypernym_closure(pair.hyponym_raw, db);

    std::set<SynsetId> candidates;
    for (const auto &[hypo_id, hyper_id] : step1) {
        for (const auto &sister : sister_terms(db, hyper_id)) {
            if (excluded.count(sister)) continue;
            if (synset_has_lemma(db.get(sister), pair.hyponym_raw)) continue;
            candidates.insert(sister);
        }
    }
    if (candidates.empty()) return std::nullopt;

    const auto pick =
        most_frequent_lemma(db, std::vector<SynsetId>(candidates.begin(), candidates.end()));
    if (!pick || pick->first == pair.hyponym_raw) return std::nullopt;
    NounPair neg;
    neg.hyponym_raw = pair.hyponym_raw;
    neg.hypernym_raw = pick->first;
    neg.set_label = SetLabel::negative;
    neg.origin = std::make_pair(pair.hyponym_raw, pair.hypernym_raw);
    return neg;
}

std::optional<NounPair> build_sister_pair(const NounPair &pair, const LexicalDatabase &db) {
    const auto step1 = hypernym_synset_pairs(pair, db);
    if (step1.empty()) return std::nullopt;

    std::set<SynsetId> candidates;
    for (const auto &[hypo_id, hyper_id] : step1) {
        for (const auto &sister : sister_terms(db, hypo_id)) {
            const Synset &s = db.get(sister);
            if (synset_has_lemma(s, pair.hyponym_raw)) continue;
            if (synset_has_lemma(s, pair.hypernym_raw)) continue;
            candidates.insert(sister);
        }
    }
    if (candidates.empty()) return std::nullopt;

    const auto pick =
        most_frequent_lemma(db, std::vector<SynsetId>(candidates.begin(), candidates.end()));
    if (!pick || pick->first == pair.hyponym_raw) return std::nullopt;
    NounPair sis;
    sis.hyponym_raw = pair.hyponym_raw;
    sis.hypernym_raw = pick->first;
    sis.set_label = SetLabel::sister;
    sis.origin = std::make_pair(pair.hyponym_raw, pair.hypernym_raw);
    return sis;
}

namespace {

std::string inflect(const std::string &base, bool plural) {
    // Naive pluralization, faithful to the published data ("cherrys").
    return plural ? base + "s" : base;
}

std::string determiner_for(const std::string &filler) {
    if (filler.empty()) return "a";
    switch (filler[0]) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return "an";
    default: return "a";
    }
}

} // namespace

ExampleSentence instantiate_pattern(const Pattern &pattern, const NounPair &pair,
                                    std::uint64_t id) {
    for (const std::string *filler : {&pair.hyponym_raw, &pair.hypernym_raw}) {
        if (filler->empty() || is_multiword(*filler))
            throw std::invalid_argument("pattern filler must be a single token: '" + *filler +
                                        "'");
    }

    const std::string hypo = inflect(pair.hyponym_raw, pattern.hypo_plural);
    const std::string hyper = inflect(pair.hypernym_raw, pattern.hyper_plural);

    // A literal 's' right after a slot belongs to the slot: it is emitted
    // only when the matching plural flag is set.
    std::string text;
    const std::string &tpl = pattern.template_text;
    for (std::size_t i = 0; i < tpl.size();) {
        if (tpl.compare(i, 6, "[hypo]") == 0) {
            text += hypo;
            i += 6;
            if (i < tpl.size() && tpl[i] == 's') ++i;
        } else if (tpl.compare(i, 7, "[hyper]") == 0) {
            text += hyper;
            i += 7;
            if (i < tpl.size() && tpl[i] == 's') ++i;
        } else if (tpl.compare(i, 6, "[a(n)]") == 0) {
            text += determiner_for(hyper);
            i += 6;
        } else {
            text += tpl[i];
            ++i;
        }
    }

    ExampleSentence ex;
    ex.id = id;
    ex.pattern = pattern.id;
    ex.text = std::move(text);
    ex.hyponym = hypo;
    ex.hypernym = hyper;
    ex.hyponym_raw = pair.hyponym_raw;
    ex.hypernym_raw = pair.hypernym_raw;
    ex.set_label = pair.set_label;
    return ex;
}

const std::vector<ExampleSentence> &DatasetTriple::set(SetLabel label) const {
    switch (label) {
    case SetLabel::positive: return positive;
    case SetLabel::negative: return negative;
    case SetLabel::sister: return sister;
    }
    throw std::logic_error("bad set label");
}

DatasetTriple build_all(const std::vector<NormTriple> &norms, const LexicalDatabase &db,
                        BuildReport *report) {
    BuildReport local;
    local.norm_triples = norms.size();

    const auto positives = extract_positive_pairs(norms);
    local.positive_pairs = positives.size();

    struct Row {
        NounPair pos, neg, sis;
    };
    std::vector<Row> rows;
    for (const auto &pair : positives) {
        if (is_multiword(pair.hyponym_raw) || is_multiword(pair.hypernym_raw)) {
            ++local.dropped_multiword;
            continue;
        }
        auto neg = build_negative_pair(pair, db);
        if (!neg) {
            ++local.dropped_no_negative;
            continue;
        }
        auto sis = build_sister_pair(pair, db);
        if (!sis) {
            ++local.dropped_no_sister;
            continue;
        }
        rows.push_back({pair, std::move(*neg), std::move(*sis)});
    }
    local.usable_pairs = rows.size();

    DatasetTriple out;
    std::uint64_t id = 0;
    for (const auto &row : rows) {
        for (const Pattern &pattern : patterns()) {
            out.positive.push_back(instantiate_pattern(pattern, row.pos, id++));
            out.negative.push_back(instantiate_pattern(pattern, row.neg, id++));
            out.sister.push_back(instantiate_pattern(pattern, row.sis, id++));
        }
    }
    local.examples_per_set = out.positive.size();
    if (report) *report = local;
    return out;
}

void export_tsv(const std::vector<ExampleSentence> &examples, const std::string &path,
                SetLabel label) {
    if (examples.empty())
        throw std::invalid_argument("export_tsv: no examples for set " +
                                    std::string(to_string(label)));
    std::string out = "id\tpattern\ttext\thyponym\thypernym\thyponym_raw\thypernym_raw\n";
    for (const auto &ex : examples) {
        out += std::to_string(ex.id);
        out += '\t';
        out += std::to_string(ex.pattern);
        out += '\t';
        out += ex.text;
        out += '\t';
        out += ex.hyponym;
        out += '\t';
        out += ex.hypernym;
        out += '\t';
        out += ex.hyponym_raw;
        out += '\t';
        out += ex.hypernym_raw;
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<ExampleSentence> import_tsv(const std::string &path, SetLabel label) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw ParseError(path + ": empty dataset file");
    const std::string expected_header = "id\tpattern\ttext\thyponym\thypernym\thyponym_raw\thypernym_raw";
    if (lines[0] != expected_header)
        throw ParseError(path + ": unexpected header '" + lines[0] + "'");
    std::vector<ExampleSentence> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split(lines[i], '\t');
        if (fields.size() != 7)
            throw ParseError(path + ":" + std::to_string(i + 1) + ": expected 7 fields, got " +
                             std::to_string(fields.size()));
        ExampleSentence ex;
        auto parse_u64 = [&](const std::string &s, const char *what) {
            std::uint64_t v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                throw ParseError(path + ":" + std::to_string(i + 1) + ": bad " +
                                 std::string(what) + " '" + s + "'");
            return v;
        };
        ex.id = parse_u64(fields[0], "id");
        ex.pattern = static_cast<int>(parse_u64(fields[1], "pattern"));
        ex.text = fields[2];
        ex.hyponym = fields[3];
        ex.hypernym = fields[4];
        ex.hyponym_raw = fields[5];
        ex.hypernym_raw = fields[6];
        ex.set_label = label;
        out.push_back(std::move(ex));
    }
    return out;
}

} // namespace taxoprobe
