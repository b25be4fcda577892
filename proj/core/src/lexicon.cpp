#include "taxoprobe/lexicon.hpp"

#include "taxoprobe/tsv.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <filesystem>
#include <set>
#include <stdexcept>

namespace taxoprobe {

void LexicalDatabase::add_synset(Synset s) {
    if (s.lemmas.empty()) throw ParseError("synset " + s.id + " has no lemmas");
    if (index_.count(s.id)) throw ParseError("duplicate synset id " + s.id);
    std::set<SynsetId> seen;
    for (const auto &p : s.parents) {
        if (p == s.id) throw ParseError("cycle: synset " + s.id + " is its own parent");
        if (!seen.insert(p).second)
            throw ParseError("duplicate parent " + p + " in synset " + s.id);
    }
    const std::size_t idx = synsets_.size();
    index_.emplace(s.id, idx);
    for (const auto &lemma : s.lemmas) {
        lemma_index_[to_lower(lemma.form)].push_back(idx);
    }
    synsets_.push_back(std::move(s));
}

void LexicalDatabase::finalize() {
    for (const auto &s : synsets_) {
        for (const auto &p : s.parents) {
            if (!index_.count(p))
                throw ParseError("synset " + s.id + " references unknown parent " + p);
        }
    }
    // Kahn's algorithm; leftover nodes mean a hypernym cycle.
    std::vector<std::size_t> out_degree(synsets_.size(), 0);
    std::vector<std::vector<std::size_t>> children(synsets_.size());
    for (std::size_t i = 0; i < synsets_.size(); ++i) {
        out_degree[i] = synsets_[i].parents.size();
        for (const auto &p : synsets_[i].parents) {
            children[index_.at(p)].push_back(i);
        }
    }
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < synsets_.size(); ++i) {
        if (out_degree[i] == 0) ready.push_back(i);
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        std::size_t n = ready.front();
        ready.pop_front();
        ++visited;
        for (std::size_t c : children[n]) {
            if (--out_degree[c] == 0) ready.push_back(c);
        }
    }
    if (visited != synsets_.size())
        throw ParseError("hypernym cycle detected in lexical database");
    finalized_ = true;
}

const Synset &LexicalDatabase::get(const SynsetId &id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::out_of_range("unknown synset id " + id);
    return synsets_[it->second];
}

std::vector<const Synset *> LexicalDatabase::synsets_of(const std::string &lemma) const {
    std::vector<const Synset *> out;
    auto it = lemma_index_.find(lemma);
    if (it == lemma_index_.end()) return out;
    out.reserve(it->second.size());
    for (std::size_t idx : it->second) out.push_back(&synsets_[idx]);
    return out;
}

LexicalDatabase load_wordnet(const std::string &path) {
    namespace fs = std::filesystem;
    if (fs::is_directory(path)) return load_wordnet_dict(path);
    return load_fixture_tsv(path);
}

LexicalDatabase load_fixture_tsv(const std::string &path) {
    LexicalDatabase db;
    auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string &line = lines[i];
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string ver_key = "# version:";
            if (line.rfind(ver_key, 0) == 0) {
                std::string v = line.substr(ver_key.size());
                v.erase(0, v.find_first_not_of(' '));
                db.set_version(v);
            }
            continue;
        }
        auto fields = split(line, '\t');
        if (fields.size() != 3)
            throw ParseError(path + ":" + std::to_string(i + 1) +
                             ": expected 3 tab-separated fields, got " +
                             std::to_string(fields.size()));
        Synset s;
        s.id = fields[0];
        if (s.id.empty())
            throw ParseError(path + ":" + std::to_string(i + 1) + ": empty synset id");
        if (!fields[1].empty()) {
            for (auto &p : split(fields[1], ',')) {
                if (!p.empty()) s.parents.push_back(p);
            }
        }
        for (auto &entry : split(fields[2], ',')) {
            if (entry.empty()) continue;
            Lemma lemma;
            auto colon = entry.rfind(':');
            if (colon == std::string::npos) {
                lemma.form = entry;
                lemma.count = 0;
            } else {
                lemma.form = entry.substr(0, colon);
                const std::string num = entry.substr(colon + 1);
                std::uint64_t value = 0;
                auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), value);
                if (ec != std::errc() || ptr != num.data() + num.size())
                    throw ParseError(path + ":" + std::to_string(i + 1) +
                                     ": bad lemma count '" + num + "'");
                lemma.count = value;
            }
            s.lemmas.push_back(std::move(lemma));
        }
        try {
            db.add_synset(std::move(s));
        } catch (const ParseError &e) {
            throw ParseError(path + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    db.finalize();
    return db;
}

std::vector<SynsetId> hypernym_closure(const LexicalDatabase &db, const SynsetId &s) {
    const Synset &start = db.get(s);
    std::set<SynsetId> seen;
    std::deque<const Synset *> frontier{&start};
    while (!frontier.empty()) {
        const Synset *cur = frontier.front();
        frontier.pop_front();
        for (const auto &p : cur->parents) {
            if (seen.insert(p).second) frontier.push_back(&db.get(p));
        }
    }
    seen.erase(s);
    return {seen.begin(), seen.end()};
}

std::vector<SynsetId> sister_terms(const LexicalDatabase &db, const SynsetId &s) {
    const Synset &self = db.get(s);
    std::set<SynsetId> parents(self.parents.begin(), self.parents.end());
    std::set<SynsetId> out;
    for (const Synset &t : db.all()) {
        if (t.id == s) continue;
        for (const auto &p : t.parents) {
            if (parents.count(p)) {
                out.insert(t.id);
                break;
            }
        }
    }
    return {out.begin(), out.end()};
}

namespace {
bool is_multiword(const std::string &lemma) {
    return lemma.find('_') != std::string::npos || lemma.find(' ') != std::string::npos;
}
} // namespace

std::optional<std::pair<std::string, SynsetId>>
most_frequent_lemma(const LexicalDatabase &db, const std::vector<SynsetId> &candidates) {
    if (candidates.empty())
        throw std::invalid_argument("most_frequent_lemma: empty candidate list");
    bool found = false;
    std::uint64_t best_count = 0;
    std::string best_lemma;
    SynsetId best_id;
    for (const auto &id : candidates) {
        const Synset &s = db.get(id);
        for (const auto &lemma : s.lemmas) {
            if (is_multiword(lemma.form)) continue;
            const std::string form = to_lower(lemma.form);
            bool better = false;
            if (!found) {
                better = true;
            } else if (lemma.count != best_count) {
                better = lemma.count > best_count;
            } else if (form != best_lemma) {
                better = form < best_lemma;
            } else {
                better = id < best_id;
            }
            if (better) {
                found = true;
                best_count = lemma.count;
                best_lemma = form;
                best_id = id;
            }
        }
    }
    if (!found) return std::nullopt;
    return std::make_pair(best_lemma, best_id);
}

} // namespace taxoprobe
