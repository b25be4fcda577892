#include "taxoprobe/heatmap.hpp"

#include "taxoprobe/tsv.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace taxoprobe {

namespace {

std::uint8_t shade(double value, double lo, double hi) {
    double t = 0.0;
    if (hi > lo) t = std::clamp((value - lo) / (hi - lo), 0.0, 1.0);
    // darker = higher
    return static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)));
}

nlohmann::json matrix_to_json(const MeanMatrix &matrix) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::uint32_t l = 0; l < matrix.layers; ++l) {
        nlohmann::json row = nlohmann::json::array();
        for (std::uint32_t h = 0; h < matrix.heads; ++h) row.push_back(matrix.at(l, h));
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

Image render_heatmap_pixels(const MeanMatrix &matrix, const HeatmapSpec &spec) {
    double lo = spec.scale_min, hi = spec.scale_max;
    if (!(hi > lo)) {
        lo = *std::min_element(matrix.values.begin(), matrix.values.end());
        hi = *std::max_element(matrix.values.begin(), matrix.values.end());
    }

    Image img;
    img.width = matrix.heads * spec.cell_px;
    img.height = matrix.layers * spec.cell_px;
    img.rgb.assign(static_cast<std::size_t>(img.width) * img.height * 3, 0);

    for (std::uint32_t l = 0; l < matrix.layers; ++l) {
        for (std::uint32_t h = 0; h < matrix.heads; ++h) {
            const std::uint8_t g = shade(matrix.at(l, h), lo, hi);
            for (std::uint32_t dy = 0; dy < spec.cell_px; ++dy) {
                for (std::uint32_t dx = 0; dx < spec.cell_px; ++dx) {
                    img.set_pixel(h * spec.cell_px + dx, l * spec.cell_px + dy, g, g, g);
                }
            }
        }
    }
    return img;
}

void render_heatmap(const MeanMatrix &matrix, const HeatmapSpec &spec) {
    const Image img = render_heatmap_pixels(matrix, spec);
    write_png(img, spec.output_path);

    double lo = spec.scale_min, hi = spec.scale_max;
    if (!(hi > lo)) {
        lo = *std::min_element(matrix.values.begin(), matrix.values.end());
        hi = *std::max_element(matrix.values.begin(), matrix.values.end());
    }
    std::uint32_t arg_l = 0, arg_h = 0;
    for (std::uint32_t l = 0; l < matrix.layers; ++l) {
        for (std::uint32_t h = 0; h < matrix.heads; ++h) {
            if (matrix.at(l, h) > matrix.at(arg_l, arg_h)) {
                arg_l = l;
                arg_h = h;
            }
        }
    }

    nlohmann::json sidecar;
    sidecar["dataset"] = spec.dataset;
    sidecar["pattern"] = spec.pattern;
    sidecar["direction"] = spec.direction;
    sidecar["layers"] = matrix.layers;
    sidecar["heads"] = matrix.heads;
    sidecar["count"] = matrix.count;
    sidecar["scale_min"] = lo;
    sidecar["scale_max"] = hi;
    sidecar["cell_px"] = spec.cell_px;
    sidecar["matrix"] = matrix_to_json(matrix);
    sidecar["argmax"] = {{"layer", arg_l}, {"head", arg_h}, {"value", matrix.at(arg_l, arg_h)}};
    for (const auto &[key, value] : spec.metadata) sidecar[key] = value;

    write_text_file(spec.output_path + ".json", sidecar.dump(2) + "\n");
}

void render_skewness_figure(const std::vector<SkewnessReport> &reports,
                            const std::string &output_path,
                            const std::map<std::string, std::string> &metadata) {
    if (reports.empty()) throw std::invalid_argument("render_skewness_figure: no reports");
    const std::uint32_t heads = static_cast<std::uint32_t>(reports[0].skewness.size());
    const std::uint32_t n_series = static_cast<std::uint32_t>(reports.size());

    double max_abs = 0.0;
    for (const auto &r : reports) {
        for (const auto &g1 : r.skewness) {
            if (g1) max_abs = std::max(max_abs, std::fabs(*g1));
        }
    }
    if (max_abs == 0.0) max_abs = 1.0;

    const std::uint32_t bar_w = 6, gap = 6, half = 60;
    Image img;
    img.width = heads * (n_series * bar_w + gap) + gap;
    img.height = 2 * half + 1;
    img.rgb.assign(static_cast<std::size_t>(img.width) * img.height * 3, 255);

    for (std::uint32_t x = 0; x < img.width; ++x) img.set_pixel(x, half, 160, 160, 160);

    // one color per dataset series
    const std::uint8_t palette[3][3] = {{60, 60, 200}, {200, 60, 60}, {60, 160, 60}};
    for (std::uint32_t s = 0; s < n_series; ++s) {
        const auto &color = palette[s % 3];
        for (std::uint32_t h = 0; h < heads; ++h) {
            const auto &g1 = reports[s].skewness[h];
            if (!g1) continue;
            const std::uint32_t x0 = gap + h * (n_series * bar_w + gap) + s * bar_w;
            const int extent = static_cast<int>(std::lround(*g1 / max_abs * half));
            const std::uint32_t y_from = extent >= 0 ? half - static_cast<std::uint32_t>(extent) : half;
            const std::uint32_t y_to = extent >= 0 ? half : half + static_cast<std::uint32_t>(-extent);
            for (std::uint32_t y = y_from; y <= y_to; ++y) {
                for (std::uint32_t dx = 0; dx < bar_w - 1; ++dx)
                    img.set_pixel(x0 + dx, y, color[0], color[1], color[2]);
            }
        }
    }
    write_png(img, output_path);

    nlohmann::json sidecar;
    sidecar["kind"] = "layer_skewness";
    sidecar["max_abs_scale"] = max_abs;
    sidecar["skewness_variant"] = "fisher-pearson g1 (biased)";
    nlohmann::json series = nlohmann::json::array();
    for (const auto &r : reports) {
        nlohmann::json s;
        s["dataset"] = to_string(r.dataset);
        s["direction"] = to_string(r.direction);
        s["layer"] = r.layer_index;
        s["which"] = r.which == LayerChoice::first ? "first" : "last";
        s["sample_size"] = r.sample_size;
        if (r.pattern_filter) s["pattern"] = *r.pattern_filter;
        else s["pattern"] = "all";
        nlohmann::json values = nlohmann::json::array();
        for (const auto &g1 : r.skewness) {
            if (g1) values.push_back(*g1);
            else values.push_back(nullptr);
        }
        s["skewness"] = std::move(values);
        series.push_back(std::move(s));
    }
    sidecar["series"] = std::move(series);
    for (const auto &[key, value] : metadata) sidecar[key] = value;
    write_text_file(output_path + ".json", sidecar.dump(2) + "\n");
}

} // namespace taxoprobe
