#include "taxoprobe/lexicon.hpp"
#include "taxoprobe/tsv.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace taxoprobe {

namespace {

// wndb(5) data line:
//   offset lex_filenum ss_type w_cnt(word lex_id){w_cnt} p_cnt(ptr){p_cnt} | gloss
// w_cnt is two hex digits, p_cnt three decimal digits. Parent links are the
// pointers whose symbol is exactly "@" with pos 'n'.
Synset parse_data_line(const std::string &line, const std::string &path, std::size_t lineno) {
    std::istringstream in(line);
    auto fail = [&](const std::string &what) -> ParseError {
        return ParseError(path + ":" + std::to_string(lineno) + ": " + what);
    };

    std::string offset, lex_filenum, ss_type, w_cnt_hex;
    if (!(in >> offset >> lex_filenum >> ss_type >> w_cnt_hex))
        throw fail("truncated synset header");
    if (ss_type != "n") throw fail("not a noun synset (ss_type '" + ss_type + "')");

    unsigned w_cnt = 0;
    {
        auto [p, ec] = std::from_chars(w_cnt_hex.data(), w_cnt_hex.data() + w_cnt_hex.size(),
                                       w_cnt, 16);
        if (ec != std::errc() || w_cnt == 0) throw fail("bad word count '" + w_cnt_hex + "'");
    }

    Synset s;
    s.id = offset;
    s.pos = 'n';
    for (unsigned i = 0; i < w_cnt; ++i) {
        std::string word, lex_id;
        if (!(in >> word >> lex_id)) throw fail("truncated word list");
        s.lemmas.push_back({to_lower(word), 0});
    }

    std::string p_cnt_str;
    if (!(in >> p_cnt_str)) throw fail("missing pointer count");
    unsigned p_cnt = 0;
    {
        auto [p, ec] =
            std::from_chars(p_cnt_str.data(), p_cnt_str.data() + p_cnt_str.size(), p_cnt, 10);
        if (ec != std::errc()) throw fail("bad pointer count '" + p_cnt_str + "'");
    }
    for (unsigned i = 0; i < p_cnt; ++i) {
        std::string symbol, target, pos, source_target;
        if (!(in >> symbol >> target >> pos >> source_target)) throw fail("truncated pointer list");
        if (symbol == "@" && pos == "n") s.parents.push_back(target);
    }
    return s;
}

// index.sense line: sense_key offset sense_number tag_cnt, where sense_key
// is lemma%ss_type:... and ss_type 1 marks nouns.
void load_sense_counts(const std::string &path,
                       std::unordered_map<std::string, std::uint64_t> *counts) {
    std::ifstream in(path);
    if (!in) return;
    std::string key, offset, sense_no, tag_cnt;
    while (in >> key >> offset >> sense_no >> tag_cnt) {
        auto percent = key.find('%');
        if (percent == std::string::npos || percent + 1 >= key.size()) continue;
        if (key[percent + 1] != '1') continue; // nouns only
        std::uint64_t n = 0;
        auto [p, ec] = std::from_chars(tag_cnt.data(), tag_cnt.data() + tag_cnt.size(), n);
        if (ec != std::errc()) continue;
        (*counts)[offset + "|" + to_lower(key.substr(0, percent))] += n;
    }
}

std::string detect_version(const std::vector<std::string> &header_lines) {
    for (const auto &line : header_lines) {
        auto pos = line.find("WordNet ");
        if (pos == std::string::npos) continue;
        std::istringstream in(line.substr(pos));
        std::string word, version;
        if (in >> word >> version) return word + " " + version;
    }
    return "unknown";
}

} // namespace

LexicalDatabase load_wordnet_dict(const std::string &dir) {
    namespace fs = std::filesystem;
    const fs::path data_path = fs::path(dir) / "data.noun";
    if (!fs::exists(data_path))
        throw ParseError("no data.noun under " + dir);

    std::ifstream in(data_path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + data_path.string());

    std::vector<Synset> parsed;
    std::vector<std::size_t> line_numbers;
    std::vector<std::string> header_lines;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == ' ') { // license header block
            header_lines.push_back(line);
            continue;
        }
        parsed.push_back(parse_data_line(line, data_path.string(), lineno));
        line_numbers.push_back(lineno);
    }

    const fs::path sense_path = fs::path(dir) / "index.sense";
    if (fs::exists(sense_path)) {
        std::unordered_map<std::string, std::uint64_t> counts;
        load_sense_counts(sense_path.string(), &counts);
        for (auto &synset : parsed) {
            for (auto &lemma : synset.lemmas) {
                auto it = counts.find(synset.id + "|" + lemma.form);
                if (it != counts.end()) lemma.count = it->second;
            }
        }
    }

    LexicalDatabase db;
    db.set_version(detect_version(header_lines));
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        try {
            db.add_synset(std::move(parsed[i]));
        } catch (const ParseError &e) {
            throw ParseError(data_path.string() + ":" + std::to_string(line_numbers[i]) + ": " +
                             e.what());
        }
    }
    db.finalize();
    return db;
}

} // namespace taxoprobe
