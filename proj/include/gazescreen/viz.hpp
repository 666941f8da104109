#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gazescreen/core.hpp"
#include "gazescreen/errors.hpp"
#include "gazescreen/io.hpp"
#include "gazescreen/mlp.hpp"

namespace gazescreen {

// Accumulates an isotropic Gaussian kernel per valid sample onto a
// width x height grid, normalizes the maximum to 255 and writes a binary
// PGM (P5). Samples are accumulated in a canonical order so permuted input
// produces identical bytes.
inline void render_heatmap(const GazeRecording& rec, const ScreenGeometry& geometry,
                           double kernel_sigma_px, const std::filesystem::path& out_path) {
    if (!(kernel_sigma_px > 0.0)) throw Error("kernel sigma must be positive");
    std::vector<const GazeSample*> valid;
    for (const auto& s : rec.samples) {
        if (s.valid) valid.push_back(&s);
    }
    if (valid.empty()) throw EmptyRecording("no valid samples to render");
    std::sort(valid.begin(), valid.end(), [](const GazeSample* a, const GazeSample* b) {
        if (a->t_ms != b->t_ms) return a->t_ms < b->t_ms;
        if (a->x != b->x) return a->x < b->x;
        return a->y < b->y;
    });

    const int w = geometry.width_px;
    const int h = geometry.height_px;
    std::vector<double> grid(static_cast<std::size_t>(w) * h, 0.0);
    const double inv_two_sigma_sq = 1.0 / (2.0 * kernel_sigma_px * kernel_sigma_px);
    const int radius = static_cast<int>(std::ceil(3.0 * kernel_sigma_px));
    for (const GazeSample* s : valid) {
        const double cx = s->x * (w - 1);
        const double cy = s->y * (h - 1);
        const int px0 = std::max(0, static_cast<int>(std::floor(cx)) - radius);
        const int px1 = std::min(w - 1, static_cast<int>(std::ceil(cx)) + radius);
        const int py0 = std::max(0, static_cast<int>(std::floor(cy)) - radius);
        const int py1 = std::min(h - 1, static_cast<int>(std::ceil(cy)) + radius);
        for (int py = py0; py <= py1; ++py) {
            for (int px = px0; px <= px1; ++px) {
                const double dx = px - cx;
                const double dy = py - cy;
                grid[static_cast<std::size_t>(py) * w + px] +=
                    std::exp(-(dx * dx + dy * dy) * inv_two_sigma_sq);
            }
        }
    }
    double peak = 0.0;
    for (double v : grid) peak = std::max(peak, v);
    std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    out.reserve(out.size() + grid.size());
    for (double v : grid) {
        const int level = peak > 0.0 ? static_cast<int>(std::lround(v / peak * 255.0)) : 0;
        out.push_back(static_cast<char>(static_cast<unsigned char>(level)));
    }
    atomic_write_file(out_path, out);
}

namespace detail {

inline std::string svg_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace detail

// Scanpath as an SVG document: AOI rectangles as outlines, fixations as
// circles with radius 4 + 40 * duration / max duration, consecutive
// fixations connected by lines, ordinal labels at the centers.
inline void render_scanpath(const std::vector<Fixation>& fixes, const AoiSet& aoi,
                            const ScreenGeometry& geometry,
                            const std::filesystem::path& out_path) {
    const double w = geometry.width_px;
    const double h = geometry.height_px;
    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(geometry.width_px) +
           "\" height=\"" + std::to_string(geometry.height_px) + "\" viewBox=\"0 0 " +
           std::to_string(geometry.width_px) + " " + std::to_string(geometry.height_px) + "\">\n";
    svg += "  <rect x=\"0\" y=\"0\" width=\"" + std::to_string(geometry.width_px) + "\" height=\"" +
           std::to_string(geometry.height_px) + "\" fill=\"white\"/>\n";
    for (const auto& region : aoi.regions) {
        for (const auto& r : region.rects) {
            svg += "  <rect x=\"" + detail::svg_num(r.x_min * w) + "\" y=\"" +
                   detail::svg_num(r.y_min * h) + "\" width=\"" +
                   detail::svg_num((r.x_max - r.x_min) * w) + "\" height=\"" +
                   detail::svg_num((r.y_max - r.y_min) * h) +
                   "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
            svg += "  <text x=\"" + detail::svg_num(r.x_min * w + 3) + "\" y=\"" +
                   detail::svg_num(r.y_min * h + 12) + "\" font-size=\"10\" fill=\"#888888\">" +
                   to_string(region.zone) + "</text>\n";
        }
    }
    double max_duration = 0.0;
    for (const auto& f : fixes) max_duration = std::max(max_duration, f.duration_ms);
    for (std::size_t i = 1; i < fixes.size(); ++i) {
        svg += "  <line x1=\"" + detail::svg_num(fixes[i - 1].centroid_x * w) + "\" y1=\"" +
               detail::svg_num(fixes[i - 1].centroid_y * h) + "\" x2=\"" +
               detail::svg_num(fixes[i].centroid_x * w) + "\" y2=\"" +
               detail::svg_num(fixes[i].centroid_y * h) +
               "\" stroke=\"#3366cc\" stroke-width=\"1\"/>\n";
    }
    for (std::size_t i = 0; i < fixes.size(); ++i) {
        const double radius =
            4.0 + (max_duration > 0.0 ? 40.0 * fixes[i].duration_ms / max_duration : 0.0);
        svg += "  <circle cx=\"" + detail::svg_num(fixes[i].centroid_x * w) + "\" cy=\"" +
               detail::svg_num(fixes[i].centroid_y * h) + "\" r=\"" + detail::svg_num(radius) +
               "\" fill=\"#3366cc\" fill-opacity=\"0.45\" stroke=\"#3366cc\"/>\n";
        svg += "  <text x=\"" + detail::svg_num(fixes[i].centroid_x * w) + "\" y=\"" +
               detail::svg_num(fixes[i].centroid_y * h) +
               "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#111111\">" +
               std::to_string(i + 1) + "</text>\n";
    }
    svg += "</svg>\n";
    atomic_write_file(out_path, svg);
}

// Long-format learning-curve table: one block of rows per named curve.
inline std::string curves_csv_string(
    const std::vector<std::pair<std::string, LearningCurve>>& curves) {
    if (curves.empty()) throw EmptyInput("no curves to emit");
    std::string out = "series,epoch,train_loss,train_acc,eval_loss,eval_acc\n";
    char buf[224];
    for (const auto& [name, curve] : curves) {
        detail::require_no_field_breakers(name, "series name");
        for (const auto& r : curve) {
            std::snprintf(buf, sizeof(buf), "%s,%d,%.9f,%.9f,%.9f,%.9f\n", name.c_str(), r.epoch,
                          r.train_loss, r.train_acc, r.eval_loss, r.eval_acc);
            out += buf;
        }
    }
    return out;
}

inline void emit_curves_csv(const std::vector<std::pair<std::string, LearningCurve>>& curves,
                            const std::filesystem::path& out_path) {
    atomic_write_file(out_path, curves_csv_string(curves));
}

}  // namespace gazescreen
