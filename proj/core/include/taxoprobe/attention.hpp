#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace taxoprobe {

enum class Direction { forward, backward, average };

const char *to_string(Direction d);
Direction direction_from_string(const std::string &s);

// Full self-attention tensor for one input: a[l][h][i][j] is the weight
// from query position i to key position j. Every (l,h,i) row sums to 1.
struct AttentionTensor {
    std::uint32_t layers = 0;
    std::uint32_t heads = 0;
    std::uint32_t seq_len = 0;
    std::vector<float> values; // layers*heads*seq*seq, row-major

    float at(std::uint32_t l, std::uint32_t h, std::uint32_t i, std::uint32_t j) const {
        return values[((static_cast<std::size_t>(l) * heads + h) * seq_len + i) * seq_len + j];
    }
    float &at(std::uint32_t l, std::uint32_t h, std::uint32_t i, std::uint32_t j) {
        return values[((static_cast<std::size_t>(l) * heads + h) * seq_len + i) * seq_len + j];
    }

    // Max deviation of any (l,h,i) row sum from 1.
    double max_row_sum_error() const;
};

// Layers x heads grid of scalar attention between the two focus tokens.
struct AttentionMatrix {
    std::uint32_t layers = 0;
    std::uint32_t heads = 0;
    std::vector<float> values; // layers*heads, layer-major
    Direction direction = Direction::forward;
    std::uint64_t example_id = 0;

    float at(std::uint32_t l, std::uint32_t h) const { return values[l * heads + h]; }
    float &at(std::uint32_t l, std::uint32_t h) { return values[l * heads + h]; }
};

} // namespace taxoprobe
