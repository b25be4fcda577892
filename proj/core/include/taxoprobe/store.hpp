#pragma once

#include "taxoprobe/attention.hpp"
#include "taxoprobe/dataset.hpp"

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace taxoprobe {

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StoreEntry {
    std::uint64_t example_id = 0;
    SetLabel set_label = SetLabel::positive;
    int pattern = 0;
    Direction direction = Direction::forward;
    std::uint64_t byte_offset = 0;
};

// Matrix store: <prefix>.index.tsv plus <prefix>.bin. Binary record layout:
// magic "ATNM", u32 L, u32 H, u32 element count (= L*H), then L*H
// little-endian float32, layer-major. While a store is being written a
// <prefix>.partial marker exists; readers refuse stores whose marker was
// never removed.
class MatrixStoreWriter {
public:
    explicit MatrixStoreWriter(const std::string &prefix);
    ~MatrixStoreWriter();

    MatrixStoreWriter(const MatrixStoreWriter &) = delete;
    MatrixStoreWriter &operator=(const MatrixStoreWriter &) = delete;

    void append(const AttentionMatrix &matrix, SetLabel label, int pattern);

    // Writes the index and removes the partial marker.
    void finalize();

    // Leaves the partial marker in place (backend failure mid-run).
    void abort();

private:
    std::string prefix_;
    std::FILE *bin_ = nullptr;
    std::uint64_t offset_ = 0;
    std::vector<StoreEntry> entries_;
    bool open_ = false;
};

class MatrixStoreReader {
public:
    explicit MatrixStoreReader(const std::string &prefix);
    ~MatrixStoreReader();

    MatrixStoreReader(const MatrixStoreReader &) = delete;
    MatrixStoreReader &operator=(const MatrixStoreReader &) = delete;

    const std::vector<StoreEntry> &entries() const { return entries_; }

    AttentionMatrix read(const StoreEntry &entry) const;

    std::vector<StoreEntry> select(std::optional<SetLabel> label,
                                   std::optional<int> pattern,
                                   std::optional<Direction> direction) const;

    bool has_set(SetLabel label) const;

private:
    std::string prefix_;
    std::FILE *bin_ = nullptr;
    std::vector<StoreEntry> entries_;
};

bool store_exists(const std::string &prefix);
bool store_is_partial(const std::string &prefix);
void remove_store(const std::string &prefix);

} // namespace taxoprobe
