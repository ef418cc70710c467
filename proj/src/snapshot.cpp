#include "vlmrrt/snapshot.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vlmrrt {

std::vector<std::pair<std::string, Rgb>> snapshot_legend() {
    return {
        {"background", palette::kBackground},
        {"obstacle", palette::kObstacle},
        {"start", palette::kStart},
        {"goal region", palette::kGoal},
        {"goal centroid", palette::kGoalCentroid},
        {"tree edge", palette::kTreeEdge},
        {"leaf node", palette::kLeaf},
        {"sampling sector", palette::kSector},
    };
}

namespace {

class Raster {
public:
    Raster(int w, int h, Rgb fill) : w_(w), h_(h), px_(3 * static_cast<std::size_t>(w) * h) {
        for (std::size_t i = 0; i < px_.size(); i += 3) {
            px_[i] = fill.r;
            px_[i + 1] = fill.g;
            px_[i + 2] = fill.b;
        }
    }

    void set(int x, int y, Rgb c) {
        if (x < 0 || x >= w_ || y < 0 || y >= h_) return;
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * w_ + x);
        px_[i] = c.r;
        px_[i + 1] = c.g;
        px_[i + 2] = c.b;
    }

    void blend(int x, int y, Rgb c, double alpha) {
        if (x < 0 || x >= w_ || y < 0 || y >= h_) return;
        const std::size_t i = 3 * (static_cast<std::size_t>(y) * w_ + x);
        auto mix = [&](std::uint8_t base, std::uint8_t over) {
            return static_cast<std::uint8_t>(std::lround((1.0 - alpha) * base + alpha * over));
        };
        px_[i] = mix(px_[i], c.r);
        px_[i + 1] = mix(px_[i + 1], c.g);
        px_[i + 2] = mix(px_[i + 2], c.b);
    }

    /// Fills pixels whose centers fall inside the continuous box [x0,x1]x[y0,y1].
    void fill_box(double x0, double y0, double x1, double y1, Rgb c) {
        const int ix0 = static_cast<int>(std::ceil(x0 - 0.5));
        const int ix1 = static_cast<int>(std::floor(x1 - 0.5));
        const int iy0 = static_cast<int>(std::ceil(y0 - 0.5));
        const int iy1 = static_cast<int>(std::floor(y1 - 0.5));
        for (int y = iy0; y <= iy1; ++y)
            for (int x = ix0; x <= ix1; ++x) set(x, y, c);
    }

    void line(double x0, double y0, double x1, double y1, Rgb c) {
        // DDA on pixel centers; endpoints rounded.
        const double dx = x1 - x0, dy = y1 - y0;
        const int steps = std::max(1, static_cast<int>(std::ceil(std::max(std::abs(dx), std::abs(dy)))));
        for (int s = 0; s <= steps; ++s) {
            const double t = static_cast<double>(s) / steps;
            set(static_cast<int>(std::lround(x0 + t * dx)),
                static_cast<int>(std::lround(y0 + t * dy)), c);
        }
    }

    void disc(double cx, double cy, double radius, Rgb c) {
        const int x0 = static_cast<int>(std::floor(cx - radius)),
                  x1 = static_cast<int>(std::ceil(cx + radius));
        const int y0 = static_cast<int>(std::floor(cy - radius)),
                  y1 = static_cast<int>(std::ceil(cy + radius));
        const double r2 = radius * radius;
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const double ddx = x + 0.5 - cx, ddy = y + 0.5 - cy;
                if (ddx * ddx + ddy * ddy <= r2) set(x, y, c);
            }
    }

    void ring(double cx, double cy, double radius, double thickness, Rgb c) {
        const int x0 = static_cast<int>(std::floor(cx - radius - thickness)),
                  x1 = static_cast<int>(std::ceil(cx + radius + thickness));
        const int y0 = static_cast<int>(std::floor(cy - radius - thickness)),
                  y1 = static_cast<int>(std::ceil(cy + radius + thickness));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const double d = std::hypot(x + 0.5 - cx, y + 0.5 - cy);
                if (std::abs(d - radius) <= thickness) set(x, y, c);
            }
    }

    std::vector<std::uint8_t> take() { return std::move(px_); }

private:
    int w_, h_;
    std::vector<std::uint8_t> px_;
};

}  // namespace

Snapshot render_snapshot(const Env& env, const Tree* tree, std::optional<int> highlight,
                         const Sector* sector, int size) {
    Snapshot snap;
    const double world_w = env.bounds.width();
    const double world_h = env.bounds.height();
    const double scale = size / std::max(world_w, world_h);
    snap.width = std::max(1, static_cast<int>(std::lround(world_w * scale)));
    snap.height = std::max(1, static_cast<int>(std::lround(world_h * scale)));
    snap.transform = WorldToPixel{scale, env.bounds.min.x(), env.bounds.min.y(), snap.width,
                                  snap.height};
    snap.legend = snapshot_legend();

    Raster raster(snap.width, snap.height, palette::kBackground);
    const WorldToPixel& tf = snap.transform;

    auto fill_world_rect = [&](const Rect& r, Rgb c) {
        const auto [x0, y1] = tf.to_pixel(r.min);  // min.y maps to the bottom row
        const auto [x1, y0] = tf.to_pixel(r.max);
        raster.fill_box(x0, y0, x1, y1, c);
    };

    for (const Rect& o : env.obstacles) fill_world_rect(o, palette::kObstacle);
    fill_world_rect(env.goal, palette::kGoal);

    if (sector) {
        // Translucent wedge, blended per pixel over whatever is underneath.
        const auto [acx, acy] = tf.to_pixel(sector->apex);
        const double pr = sector->radius * tf.scale;
        const int x0 = static_cast<int>(std::floor(acx - pr)),
                  x1 = static_cast<int>(std::ceil(acx + pr));
        const int y0 = static_cast<int>(std::floor(acy - pr)),
                  y1 = static_cast<int>(std::ceil(acy + pr));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                if (sector->contains(tf.to_world(x + 0.5, y + 0.5)))
                    raster.blend(x, y, palette::kSector, 0.45);
            }
    }

    if (tree) {
        for (int v = 1; v < tree->size(); ++v) {
            const auto [ax, ay] = tf.to_pixel(tree->vertex(tree->parent(v)));
            const auto [bx, by] = tf.to_pixel(tree->vertex(v));
            raster.line(ax, ay, bx, by, palette::kTreeEdge);
        }
        for (int v : tree->leaves()) {
            const auto [px, py] = tf.to_pixel(tree->vertex(v));
            raster.disc(px, py, 3.0, palette::kLeaf);
        }
        if (highlight && *highlight >= 0 && *highlight < tree->size()) {
            const auto [px, py] = tf.to_pixel(tree->vertex(*highlight));
            raster.ring(px, py, 6.0, 1.5, palette::kLeaf);
        }
    }

    {
        const auto [px, py] = tf.to_pixel(env.start.centroid());
        raster.disc(px, py, 5.0, palette::kStart);
    }
    {
        const auto [px, py] = tf.to_pixel(env.goal_centroid);
        raster.disc(px, py, 3.0, palette::kGoalCentroid);
    }

    snap.pixels = raster.take();
    return snap;
}

std::vector<std::uint8_t> encode_png(const Snapshot& snapshot) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(snapshot.width);
    image.height = static_cast<png_uint_32>(snapshot.height);
    image.format = PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, snapshot.pixels.data(),
                                   3 * snapshot.width, nullptr)) {
        throw std::runtime_error("png size probe failed");
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, snapshot.pixels.data(),
                                   3 * snapshot.width, nullptr)) {
        throw std::runtime_error(std::string("png encode failed: ") + image.message);
    }
    out.resize(size);
    return out;
}

void write_png_file(const Snapshot& snapshot, const std::string& path) {
    const std::vector<std::uint8_t> png = encode_png(snapshot);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
}

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string svg_color(Rgb c) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

}  // namespace

std::string export_figure(const Env& env, const Tree* tree, const std::vector<Point2>* path,
                          int size) {
    const double world_w = env.bounds.width();
    const double world_h = env.bounds.height();
    const double scale = size / std::max(world_w, world_h);
    const double w = world_w * scale;
    const double h = world_h * scale;
    const double legend_h = 20.0;

    auto X = [&](double x) { return (x - env.bounds.min.x()) * scale; };
    auto Y = [&](double y) { return h - (y - env.bounds.min.y()) * scale; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\""
        << fmt(h + legend_h) << "\" viewBox=\"0 0 " << fmt(w) << " " << fmt(h + legend_h)
        << "\">\n";
    svg << "  <rect x=\"0\" y=\"0\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
        << "\" fill=\"" << svg_color(palette::kBackground) << "\" stroke=\"#000000\"/>\n";

    auto rect_elem = [&](const Rect& r, Rgb c) {
        svg << "  <rect x=\"" << fmt(X(r.min.x())) << "\" y=\"" << fmt(Y(r.max.y()))
            << "\" width=\"" << fmt(r.width() * scale) << "\" height=\""
            << fmt(r.height() * scale) << "\" fill=\"" << svg_color(c) << "\"/>\n";
    };
    for (const Rect& o : env.obstacles) rect_elem(o, palette::kObstacle);
    rect_elem(env.goal, palette::kGoal);
    rect_elem(env.start, palette::kStart);

    if (tree) {
        svg << "  <g stroke=\"" << svg_color(palette::kTreeEdge) << "\" stroke-width=\"1\">\n";
        for (int v = 1; v < tree->size(); ++v) {
            const Point2& a = tree->vertex(tree->parent(v));
            const Point2& b = tree->vertex(v);
            svg << "    <line x1=\"" << fmt(X(a.x())) << "\" y1=\"" << fmt(Y(a.y()))
                << "\" x2=\"" << fmt(X(b.x())) << "\" y2=\"" << fmt(Y(b.y())) << "\"/>\n";
        }
        svg << "  </g>\n";
    }

    if (path && !path->empty()) {
        svg << "  <polyline fill=\"none\" stroke=\"#1f3c88\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < path->size(); ++i) {
            if (i) svg << " ";
            svg << fmt(X((*path)[i].x())) << "," << fmt(Y((*path)[i].y()));
        }
        svg << "\"/>\n";
    }

    svg << "  <circle cx=\"" << fmt(X(env.goal_centroid.x())) << "\" cy=\""
        << fmt(Y(env.goal_centroid.y())) << "\" r=\"3\" fill=\""
        << svg_color(palette::kGoalCentroid) << "\"/>\n";

    double lx = 4.0;
    for (const auto& [role, color] : snapshot_legend()) {
        if (role == "background") continue;
        svg << "  <rect x=\"" << fmt(lx) << "\" y=\"" << fmt(h + 5.0)
            << "\" width=\"10\" height=\"10\" fill=\"" << svg_color(color) << "\"/>\n";
        svg << "  <text x=\"" << fmt(lx + 13.0) << "\" y=\"" << fmt(h + 14.0)
            << "\" font-size=\"10\" font-family=\"sans-serif\">" << role << "</text>\n";
        lx += 13.0 + 6.2 * static_cast<double>(role.size()) + 10.0;
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace vlmrrt
