#pragma once

#include "taxoprobe/analysis.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace taxoprobe {

struct Image {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> rgb; // width*height*3

    void set_pixel(std::uint32_t x, std::uint32_t y, std::uint8_t r, std::uint8_t g,
                   std::uint8_t b);
};

void write_png(const Image &image, const std::string &path);

struct HeatmapSpec {
    std::string dataset;   // label name, recorded in the sidecar
    std::string pattern;   // "1".."5" or "all"
    std::string direction;
    std::string output_path;
    // Fixed color scale; scale_max <= scale_min means auto from the matrix.
    double scale_min = 0.0;
    double scale_max = 0.0;
    std::uint32_t cell_px = 24;
    std::map<std::string, std::string> metadata; // extra sidecar fields
};

// x-axis heads, y-axis layers (layer 0 on top), darker = higher.
Image render_heatmap_pixels(const MeanMatrix &matrix, const HeatmapSpec &spec);

// Writes the PNG plus a JSON sidecar at <output_path>.json holding the
// numeric matrix, the scale bounds, the argmax cell and the spec metadata,
// so figures can be compared without pixel diffing.
void render_heatmap(const MeanMatrix &matrix, const HeatmapSpec &spec);

// Grouped per-head bar chart of first/last layer skewness, one group per
// head, one bar per report (dataset). Writes PNG + sidecar like
// render_heatmap.
void render_skewness_figure(const std::vector<SkewnessReport> &reports,
                            const std::string &output_path,
                            const std::map<std::string, std::string> &metadata);

} // namespace taxoprobe
