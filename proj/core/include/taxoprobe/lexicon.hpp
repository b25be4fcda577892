#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace taxoprobe {

using SynsetId = std::string;

struct Lemma {
    std::string form;    // lowercase, underscores for spaces
    std::uint64_t count; // tag count; 0 when the source carries none
};

struct Synset {
    SynsetId id;
    char pos = 'n';
    std::vector<Lemma> lemmas;      // non-empty, source order
    std::vector<SynsetId> parents;  // direct hypernyms, no duplicates, never self
};

// Immutable after load; safe for concurrent readers.
class LexicalDatabase {
public:
    LexicalDatabase() = default;

    // Throws ParseError on duplicate id, self-parent, or duplicate parent.
    void add_synset(Synset s);

    // Validates referential integrity and acyclicity of the hypernym graph.
    // Call once after the last add_synset.
    void finalize();

    std::size_t size() const { return synsets_.size(); }
    bool contains(const SynsetId &id) const { return index_.count(id) != 0; }

    const Synset &get(const SynsetId &id) const; // throws on unknown id
    const std::vector<Synset> &all() const { return synsets_; }

    // All noun synsets containing the lemma, in database order.
    // Unknown lemma yields an empty list.
    std::vector<const Synset *> synsets_of(const std::string &lemma) const;

    std::size_t lemma_index_size() const { return lemma_index_.size(); }

    // Source database version ("unknown" when the input does not state one).
    const std::string &version() const { return version_; }
    void set_version(std::string v) { version_ = std::move(v); }

private:
    std::vector<Synset> synsets_;
    std::unordered_map<SynsetId, std::size_t> index_;
    std::unordered_map<std::string, std::vector<std::size_t>> lemma_index_;
    std::string version_ = "unknown";
    bool finalized_ = false;
};

// Loads a lexical database. A directory is treated as a WordNet dictionary
// (data.noun required, index.sense optional for tag counts); a file is
// parsed in the fixture format:
//   synset_id <TAB> parent_ids(comma-sep) <TAB> lemma:count(comma-sep)
// '#' lines are comments; '# version: <str>' sets the database version.
LexicalDatabase load_wordnet(const std::string &path);

LexicalDatabase load_fixture_tsv(const std::string &path);
LexicalDatabase load_wordnet_dict(const std::string &dir);

// Transitive closure over parent links, excluding s itself.
std::vector<SynsetId> hypernym_closure(const LexicalDatabase &db, const SynsetId &s);

// All synsets t != s sharing at least one direct parent with s, sorted by id.
std::vector<SynsetId> sister_terms(const LexicalDatabase &db, const SynsetId &s);

// Highest tag count over the single-word lemmas of the candidate synsets.
// Ties break lexicographically by lemma, then by synset id. Throws
// std::invalid_argument on an empty candidate list; returns nullopt when no
// candidate carries a single-word lemma.
std::optional<std::pair<std::string, SynsetId>>
most_frequent_lemma(const LexicalDatabase &db, const std::vector<SynsetId> &candidates);

} // namespace taxoprobe
