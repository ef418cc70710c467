#pragma once

#include "vlmrrt/env.hpp"
#include "vlmrrt/sector.hpp"
#include "vlmrrt/tree.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vlmrrt {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

/// Shared palette; the prompt text legend is generated from this same table
/// so image and instructions cannot drift apart.
namespace palette {
inline constexpr Rgb kBackground{255, 255, 255};
inline constexpr Rgb kObstacle{80, 80, 80};
inline constexpr Rgb kStart{220, 50, 47};
inline constexpr Rgb kGoal{64, 192, 87};
inline constexpr Rgb kGoalCentroid{24, 96, 40};
inline constexpr Rgb kTreeEdge{160, 200, 255};
inline constexpr Rgb kLeaf{38, 90, 220};
inline constexpr Rgb kSector{250, 210, 60};
}  // namespace palette

/// Rows of (role, color) describing what the renderer draws.
std::vector<std::pair<std::string, Rgb>> snapshot_legend();

/// Similarity transform world -> pixel with +y up in world mapped to up in
/// the image (row 0 is the top). Uniform scale; the world rectangle is
/// centered in the image.
struct WorldToPixel {
    double scale = 1.0;
    double ox = 0.0, oy = 0.0;  // world-space offset applied before scaling
    int width = 0, height = 0;

    // Continuous pixel coordinates (column, row).
    std::pair<double, double> to_pixel(const Point2& w) const {
        return {(w.x() - ox) * scale, height - (w.y() - oy) * scale};
    }
    Point2 to_world(double px, double py) const {
        return {px / scale + ox, (height - py) / scale + oy};
    }
};

struct Snapshot {
    int width = 0, height = 0;
    std::vector<std::uint8_t> pixels;  // RGB8, row-major, row 0 at the top
    std::vector<std::pair<std::string, Rgb>> legend;
    WorldToPixel transform;

    Rgb at(int x, int y) const {
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
        return {pixels[i], pixels[i + 1], pixels[i + 2]};
    }
};

/// Deterministic raster of the world plus search state: white background,
/// filled obstacles, start marker, filled goal with centroid dot, tree edges,
/// leaf dots, an optional enlarged ring around `highlight`, and an optional
/// translucent sector wedge.
Snapshot render_snapshot(const Env& env, const Tree* tree, std::optional<int> highlight,
                         const Sector* sector, int size = 512);

std::vector<std::uint8_t> encode_png(const Snapshot& snapshot);
void write_png_file(const Snapshot& snapshot, const std::string& path);

/// Deterministic SVG figure: obstacles, start/goal, optional tree edges and
/// path polyline, plus a legend block.
std::string export_figure(const Env& env, const Tree* tree, const std::vector<Point2>* path,
                          int size = 640);

}  // namespace vlmrrt
