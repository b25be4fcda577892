#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace taxoprobe {

// Error type for all loaders; message carries file name and, where known,
// the 1-based line number of the offending row.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(std::string_view line, char delim);
std::string join(const std::vector<std::string> &fields, char delim);

std::string to_lower(std::string_view s);

std::uint64_t fnv1a64(std::string_view data);

// Reads a whole text file, splitting on '\n' and dropping a trailing '\r'
// per line so CRLF inputs parse the same as LF.
std::vector<std::string> read_lines(const std::string &path);

void write_text_file(const std::string &path, const std::string &content);
std::string read_text_file(const std::string &path);

// Delimited table with a header row. Column lookup is case-insensitive.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column, or throws ParseError naming the column.
    std::size_t column(const std::string &name) const;
};

Table read_table(const std::string &path, char delim);

} // namespace taxoprobe
