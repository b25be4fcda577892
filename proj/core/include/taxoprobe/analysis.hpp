#pragma once

#include "taxoprobe/store.hpp"

#include <optional>
#include <string>
#include <vector>

namespace taxoprobe {

struct MeanMatrix {
    std::uint32_t layers = 0;
    std::uint32_t heads = 0;
    std::vector<double> values; // layer-major
    std::size_t count = 0;      // examples averaged over

    double at(std::uint32_t l, std::uint32_t h) const { return values[l * heads + h]; }
};

// Elementwise mean over the selected matrices. Throws StoreError on an
// empty selection.
MeanMatrix average_matrix(const MatrixStoreReader &store, SetLabel dataset,
                          std::optional<int> pattern_filter, Direction direction);

enum class LayerChoice { first, last };

struct SkewnessReport {
    SetLabel dataset = SetLabel::positive;
    Direction direction = Direction::forward;
    LayerChoice which = LayerChoice::first;
    std::uint32_t layer_index = 0;
    std::optional<int> pattern_filter;
    std::size_t sample_size = 0;
    // Fisher-Pearson g1 per head; nullopt marks zero-variance heads.
    std::vector<std::optional<double>> skewness;
};

// Per head of the first or last layer: sample skewness g1 = m3 / m2^(3/2)
// of that head's attention value over the selected examples. Requires at
// least 3 matching matrices.
SkewnessReport layer_skewness(const MatrixStoreReader &store, SetLabel dataset,
                              Direction direction, LayerChoice which,
                              std::optional<int> pattern_filter = std::nullopt);

// Direct moment-formula skewness of a raw sample; shared with the figure
// code. nullopt on zero variance.
std::optional<double> sample_skewness(const std::vector<double> &sample);

} // namespace taxoprobe
