#include "taxoprobe/wordpiece.hpp"

#include "taxoprobe/tsv.hpp"

#include <cctype>
#include <sstream>

namespace taxoprobe {

namespace {
constexpr std::size_t max_chars_per_word = 100;

bool is_word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }
} // namespace

std::vector<std::string> WordPieceTokenizer::basic_split(const std::string &text) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else if (is_word_char(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else {
            // punctuation and symbols become single-char tokens
            flush();
            out.push_back(std::string(1, static_cast<char>(c)));
        }
    }
    flush();
    return out;
}

WordPieceTokenizer::WordPieceTokenizer(const std::string &vocab_path) {
    const std::string content = read_text_file(vocab_path);
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) vocab_.insert(line);
    }
    if (vocab_.empty()) throw ParseError("empty wordpiece vocabulary: " + vocab_path);
    char digest[32];
    std::snprintf(digest, sizeof digest, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    vocab_id_ = "wordpiece:" + vocab_path + "#" + digest;
}

std::vector<std::string> WordPieceTokenizer::tokenize(const std::string &text) const {
    std::vector<std::string> out;
    out.push_back("[CLS]");
    for (const std::string &word : basic_split(text)) {
        if (word.size() > max_chars_per_word) {
            out.push_back("[UNK]");
            continue;
        }
        std::vector<std::string> pieces;
        std::size_t start = 0;
        bool bad = false;
        while (start < word.size()) {
            std::size_t end = word.size();
            std::string found;
            while (start < end) {
                std::string piece = (start ? "##" : "") + word.substr(start, end - start);
                if (vocab_.count(piece)) {
                    found = std::move(piece);
                    break;
                }
                --end;
            }
            if (found.empty()) {
                bad = true;
                break;
            }
            pieces.push_back(std::move(found));
            start = end;
        }
        if (bad) {
            out.push_back("[UNK]");
        } else {
            for (auto &p : pieces) out.push_back(std::move(p));
        }
    }
    out.push_back("[SEP]");
    return out;
}

} // namespace taxoprobe
