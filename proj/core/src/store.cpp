#include "taxoprobe/store.hpp"

#include "taxoprobe/tsv.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <filesystem>

namespace taxoprobe {

static_assert(std::endian::native == std::endian::little,
              "matrix store writes little-endian records directly");

namespace {

namespace fs = std::filesystem;

constexpr char store_magic[4] = {'A', 'T', 'N', 'M'};

std::string bin_path(const std::string &prefix) { return prefix + ".bin"; }
std::string index_path(const std::string &prefix) { return prefix + ".index.tsv"; }
std::string partial_path(const std::string &prefix) { return prefix + ".partial"; }

constexpr const char *index_header = "example_id\tset_label\tpattern\tdirection\tbyte_offset";

} // namespace

MatrixStoreWriter::MatrixStoreWriter(const std::string &prefix) : prefix_(prefix) {
    const fs::path parent = fs::path(prefix).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    write_text_file(partial_path(prefix_), "store write in progress\n");
    bin_ = std::fopen(bin_path(prefix_).c_str(), "wb");
    if (!bin_) throw StoreError("cannot open store binary for writing: " + bin_path(prefix_));
    open_ = true;
}

MatrixStoreWriter::~MatrixStoreWriter() {
    if (open_) abort();
}

void MatrixStoreWriter::append(const AttentionMatrix &matrix, SetLabel label, int pattern) {
    if (!open_) throw StoreError("store writer already closed");
    const std::uint32_t count = matrix.layers * matrix.heads;
    if (matrix.values.size() != count) throw StoreError("matrix value count mismatch");

    StoreEntry entry;
    entry.example_id = matrix.example_id;
    entry.set_label = label;
    entry.pattern = pattern;
    entry.direction = matrix.direction;
    entry.byte_offset = offset_;

    const std::uint32_t header[3] = {matrix.layers, matrix.heads, count};
    if (std::fwrite(store_magic, 1, 4, bin_) != 4 ||
        std::fwrite(header, sizeof(std::uint32_t), 3, bin_) != 3 ||
        std::fwrite(matrix.values.data(), sizeof(float), count, bin_) != count)
        throw StoreError("store write failed: " + bin_path(prefix_));

    offset_ += 4 + 3 * sizeof(std::uint32_t) + count * sizeof(float);
    entries_.push_back(entry);
}

void MatrixStoreWriter::finalize() {
    if (!open_) throw StoreError("store writer already closed");
    std::fclose(bin_);
    bin_ = nullptr;
    open_ = false;

    std::string index = std::string(index_header) + "\n";
    for (const auto &e : entries_) {
        index += std::to_string(e.example_id);
        index += '\t';
        index += to_string(e.set_label);
        index += '\t';
        index += std::to_string(e.pattern);
        index += '\t';
        index += to_string(e.direction);
        index += '\t';
        index += std::to_string(e.byte_offset);
        index += '\n';
    }
    write_text_file(index_path(prefix_), index);
    fs::remove(partial_path(prefix_));
}

void MatrixStoreWriter::abort() {
    if (bin_) {
        std::fclose(bin_);
        bin_ = nullptr;
    }
    open_ = false;
    // the partial marker stays; readers will refuse this store
}

MatrixStoreReader::MatrixStoreReader(const std::string &prefix) : prefix_(prefix) {
    if (store_is_partial(prefix))
        throw StoreError("store is marked partial (aborted write): " + prefix);
    if (!fs::exists(index_path(prefix)) || !fs::exists(bin_path(prefix)))
        throw StoreError("matrix store not found: " + prefix);

    const auto lines = read_lines(index_path(prefix));
    if (lines.empty() || lines[0] != index_header)
        throw StoreError(index_path(prefix) + ": bad index header");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split(lines[i], '\t');
        if (fields.size() != 5)
            throw StoreError(index_path(prefix) + ":" + std::to_string(i + 1) +
                             ": expected 5 fields");
        StoreEntry e;
        auto parse_u64 = [&](const std::string &s) {
            std::uint64_t v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                throw StoreError(index_path(prefix) + ":" + std::to_string(i + 1) +
                                 ": bad number '" + s + "'");
            return v;
        };
        e.example_id = parse_u64(fields[0]);
        e.set_label = set_label_from_string(fields[1]);
        e.pattern = static_cast<int>(parse_u64(fields[2]));
        e.direction = direction_from_string(fields[3]);
        e.byte_offset = parse_u64(fields[4]);
        entries_.push_back(e);
    }

    bin_ = std::fopen(bin_path(prefix).c_str(), "rb");
    if (!bin_) throw StoreError("cannot open store binary: " + bin_path(prefix));
}

MatrixStoreReader::~MatrixStoreReader() {
    if (bin_) std::fclose(bin_);
}

AttentionMatrix MatrixStoreReader::read(const StoreEntry &entry) const {
    if (std::fseek(bin_, static_cast<long>(entry.byte_offset), SEEK_SET) != 0)
        throw StoreError("store seek failed");
    char magic[4];
    std::uint32_t header[3];
    if (std::fread(magic, 1, 4, bin_) != 4 || std::memcmp(magic, store_magic, 4) != 0)
        throw StoreError("bad store record magic at offset " + std::to_string(entry.byte_offset));
    if (std::fread(header, sizeof(std::uint32_t), 3, bin_) != 3)
        throw StoreError("truncated store record header");
    if (header[2] != header[0] * header[1])
        throw StoreError("inconsistent store record element count");

    AttentionMatrix m;
    m.layers = header[0];
    m.heads = header[1];
    m.values.resize(header[2]);
    m.direction = entry.direction;
    m.example_id = entry.example_id;
    if (std::fread(m.values.data(), sizeof(float), header[2], bin_) != header[2])
        throw StoreError("truncated store record payload");
    return m;
}

std::vector<StoreEntry> MatrixStoreReader::select(std::optional<SetLabel> label,
                                                  std::optional<int> pattern,
                                                  std::optional<Direction> direction) const {
    std::vector<StoreEntry> out;
    for (const auto &e : entries_) {
        if (label && e.set_label != *label) continue;
        if (pattern && e.pattern != *pattern) continue;
        if (direction && e.direction != *direction) continue;
        out.push_back(e);
    }
    return out;
}

bool MatrixStoreReader::has_set(SetLabel label) const {
    for (const auto &e : entries_) {
        if (e.set_label == label) return true;
    }
    return false;
}

bool store_exists(const std::string &prefix) {
    return fs::exists(index_path(prefix)) || fs::exists(bin_path(prefix)) ||
           fs::exists(partial_path(prefix));
}

bool store_is_partial(const std::string &prefix) { return fs::exists(partial_path(prefix)); }

void remove_store(const std::string &prefix) {
    fs::remove(index_path(prefix));
    fs::remove(bin_path(prefix));
    fs::remove(partial_path(prefix));
}

} // namespace taxoprobe
