#include "fixtures.hpp"

#include <atomic>
#include <deque>
#include <random>
#include <sstream>

#ifndef _WIN32
#include <unistd.h>
#endif

namespace taxoprobe::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string &tag) {
    static std::atomic<int> counter{0};
    const int id = counter.fetch_add(1);
#ifndef _WIN32
    const int pid = getpid();
#else
    const int pid = 0;
#endif
    path_ = fs::temp_directory_path() /
            ("taxoprobe_" + tag + "_" + std::to_string(pid) + "_" + std::to_string(id));
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string paper_taxonomy_tsv() {
    return "# version: fixture-paper-1\n"
           "n01\t\tentity:10\n"
           "n02\tn01\torganism:60,being:4\n"
           "n03\tn02\tanimal:200,animate_being:3\n"
           "n04\tn02\tperson:500,individual:40\n"
           "n05\tn02\tplant:100,flora:2\n"
           "n06\tn03\tbird:120\n"
           "n07\tn03\treptile:25\n"
           "n08\tn03\tmammal:30\n"
           "n09\tn06\traven:8\n"
           "n10\tn06\tcrow:18\n"
           "n11\tn06\thawk:14\n"
           "n12\tn07\talligator:5\n"
           "n13\tn07\tcrocodile:9\n";
}

std::string paper_norms_tsv() {
    return "concept\tfeature\trelation\n"
           "raven\ta_bird\tsuperordinate\n"
           "raven\tan_animal\tsuperordinate\n"
           "raven\thas_feathers\tpart\n"
           "raven\ta_bird\tsuperordinate\n" // duplicate, dropped
           "alligator\ta_reptile\tsuperordinate\n"
           "organism\tan_entity\tsuperordinate\n"; // no counterfactual exists
}

namespace {

// pronounceable, collision-free synthetic nouns
std::string synth_word(int index, int syllables) {
    static const char consonants[] = "bdfgklmnprstvz";
    static const char vowels[] = "aeiou";
    const int nc = 14, nv = 5;
    std::string word;
    int x = index;
    for (int s = 0; s < syllables; ++s) {
        word += consonants[x % nc];
        x /= nc;
        word += vowels[x % nv];
        x /= nv;
    }
    return word;
}

} // namespace

SyntheticFixture make_synthetic_fixture(const SyntheticSpec &spec) {
    std::ostringstream lex, norms;
    lex << "# version: fixture-synth-1\n";
    lex << "r0\t\tentity:1\n";
    norms << "concept\tfeature\trelation\n";

    SyntheticFixture out;
    int parent_index = 0, leaf_index = 0;
    for (int g = 0; g < spec.grandparents; ++g) {
        const std::string gid = "g" + std::to_string(g);
        lex << gid << "\tr0\t" << synth_word(g, 2) << "x:" << (3 + g) << "\n";
        for (int p = 0; p < spec.parents; ++p) {
            const std::string pid = "p" + std::to_string(parent_index);
            // vary the first letter so both determiners come up
            const std::string pword =
                (parent_index % 3 == 0 ? "a" : "") + synth_word(100 + parent_index, 2);
            lex << pid << "\t" << gid << "\t" << pword << ":" << (10 + parent_index) << "\n";
            for (int l = 0; l < spec.leaves; ++l) {
                const std::string lid = "x" + std::to_string(leaf_index);
                const std::string lword = synth_word(leaf_index, 3);
                lex << lid << "\t" << pid << "\t" << lword << ":" << (5 + leaf_index) << "\n";
                norms << lword << "\t" << pword << "\tsuperordinate\n";
                if (leaf_index % 7 == 0)
                    norms << lword << "\tgreenish\tvisual\n"; // filtered out
                ++leaf_index;
                ++out.usable_pairs;
            }
            ++parent_index;
        }
    }
    out.lexicon_tsv = lex.str();
    out.norms_tsv = norms.str();
    return out;
}

std::set<std::string> bfs_reachable(const std::map<std::string, std::vector<std::string>> &parents,
                                    const std::string &start) {
    std::set<std::string> seen;
    std::deque<std::string> frontier{start};
    while (!frontier.empty()) {
        const std::string cur = frontier.front();
        frontier.pop_front();
        auto it = parents.find(cur);
        if (it == parents.end()) continue;
        for (const auto &p : it->second) {
            if (seen.insert(p).second) frontier.push_back(p);
        }
    }
    seen.erase(start);
    return seen;
}

RandomDag make_random_dag(std::uint64_t seed, int max_nodes) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> node_count(1, max_nodes);
    const int n = node_count(gen);

    RandomDag dag;
    std::ostringstream tsv;
    tsv << "# version: random-dag-" << seed << "\n";
    for (int i = 0; i < n; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "d%03d", i);
        dag.ids.emplace_back(id);

        std::vector<std::string> parents;
        if (i > 0) {
            std::uniform_int_distribution<int> parent_count(0, std::min(i, 3));
            const int k = parent_count(gen);
            std::uniform_int_distribution<int> pick(0, i - 1);
            std::set<int> chosen;
            while (static_cast<int>(chosen.size()) < k) chosen.insert(pick(gen));
            for (int j : chosen) parents.push_back(dag.ids[static_cast<std::size_t>(j)]);
        }
        dag.parents[dag.ids.back()] = parents;

        tsv << id << "\t";
        for (std::size_t j = 0; j < parents.size(); ++j) {
            if (j) tsv << ",";
            tsv << parents[j];
        }
        tsv << "\tw" << i << ":" << i << "\n";
    }
    dag.tsv = tsv.str();
    return dag;
}

} // namespace taxoprobe::testing
