#include "taxoprobe/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace taxoprobe {

MeanMatrix average_matrix(const MatrixStoreReader &store, SetLabel dataset,
                          std::optional<int> pattern_filter, Direction direction) {
    const auto entries = store.select(dataset, pattern_filter, direction);
    if (entries.empty())
        throw StoreError(std::string("average_matrix: no matrices for ") + to_string(dataset));

    MeanMatrix mean;
    for (const auto &entry : entries) {
        const AttentionMatrix m = store.read(entry);
        if (mean.count == 0) {
            mean.layers = m.layers;
            mean.heads = m.heads;
            mean.values.assign(m.values.size(), 0.0);
        } else if (m.layers != mean.layers || m.heads != mean.heads) {
            throw StoreError("average_matrix: inconsistent matrix shapes in store");
        }
        for (std::size_t i = 0; i < m.values.size(); ++i) mean.values[i] += m.values[i];
        ++mean.count;
    }
    for (double &v : mean.values) v /= static_cast<double>(mean.count);
    return mean;
}

std::optional<double> sample_skewness(const std::vector<double> &sample) {
    const std::size_t n = sample.size();
    if (n == 0) return std::nullopt;
    const auto [lo, hi] = std::minmax_element(sample.begin(), sample.end());
    if (*lo == *hi) return std::nullopt; // zero variance

    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= static_cast<double>(n);

    double m2 = 0.0, m3 = 0.0;
    for (double x : sample) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    if (m2 <= 0.0) return std::nullopt;
    return m3 / std::pow(m2, 1.5);
}

SkewnessReport layer_skewness(const MatrixStoreReader &store, SetLabel dataset,
                              Direction direction, LayerChoice which,
                              std::optional<int> pattern_filter) {
    const auto entries = store.select(dataset, pattern_filter, direction);
    if (entries.size() < 3)
        throw StoreError("layer_skewness: need at least 3 matrices, have " +
                         std::to_string(entries.size()));

    std::vector<AttentionMatrix> matrices;
    matrices.reserve(entries.size());
    for (const auto &e : entries) matrices.push_back(store.read(e));

    const std::uint32_t layers = matrices[0].layers;
    const std::uint32_t heads = matrices[0].heads;
    const std::uint32_t layer = (which == LayerChoice::first) ? 0 : layers - 1;

    SkewnessReport report;
    report.dataset = dataset;
    report.direction = direction;
    report.which = which;
    report.layer_index = layer;
    report.pattern_filter = pattern_filter;
    report.sample_size = matrices.size();
    report.skewness.resize(heads);

    std::vector<double> sample(matrices.size());
    for (std::uint32_t h = 0; h < heads; ++h) {
        for (std::size_t i = 0; i < matrices.size(); ++i) sample[i] = matrices[i].at(layer, h);
        report.skewness[h] = sample_skewness(sample);
    }
    return report;
}

} // namespace taxoprobe
