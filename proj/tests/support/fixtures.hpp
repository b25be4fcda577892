#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace taxoprobe::testing {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string &tag);
    ~TempDir();

    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    const std::filesystem::path &path() const { return path_; }
    std::string file(const std::string &name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

// Small taxonomy around the raven/bird/animal running example:
//
//   entity > organism > {animal, person, plant}
//   animal > {bird, reptile, mammal}
//   bird > {raven, crow, hawk}; reptile > {alligator, crocodile}
//
// Counts are set so the counterfactual picks are raven->person (negative
// for animal) and raven->crow (sister).
std::string paper_taxonomy_tsv();

// Matching feature-norms fixture, tab-delimited with a few non-superordinate
// and duplicate rows mixed in.
std::string paper_norms_tsv();

// Deterministic synthetic taxonomy large enough for probe experiments:
// `grandparents` top groups, `parents` mid nodes each, `leaves` nouns per
// mid node. Every (leaf, parent) pair has both counterfactuals available.
struct SyntheticSpec {
    int grandparents = 4;
    int parents = 5;
    int leaves = 6;
};

struct SyntheticFixture {
    std::string lexicon_tsv;
    std::string norms_tsv;
    std::size_t usable_pairs = 0;
};

SyntheticFixture make_synthetic_fixture(const SyntheticSpec &spec);

// Brute-force reachability over an explicit parent map; the oracle for
// hypernym_closure.
std::set<std::string> bfs_reachable(const std::map<std::string, std::vector<std::string>> &parents,
                                    const std::string &start);

// Random DAG in fixture-TSV form: node i may only point at nodes j < i, so
// the graph is acyclic by construction. Returns the parent map alongside.
struct RandomDag {
    std::string tsv;
    std::map<std::string, std::vector<std::string>> parents;
    std::vector<std::string> ids;
};
RandomDag make_random_dag(std::uint64_t seed, int max_nodes = 50);

} // namespace taxoprobe::testing
