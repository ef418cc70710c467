#pragma once

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace vlmrrt {

using Point2 = Eigen::Vector2d;

inline bool is_finite(const Point2& p) {
    return std::isfinite(p.x()) && std::isfinite(p.y());
}

/// Axis-aligned rectangle, treated as a closed set everywhere in the library:
/// touching the boundary counts as containment/collision.
struct Rect {
    Point2 min{0.0, 0.0};
    Point2 max{0.0, 0.0};

    double width() const { return max.x() - min.x(); }
    double height() const { return max.y() - min.y(); }
    double area() const { return width() * height(); }
    Point2 centroid() const { return 0.5 * (min + max); }

    bool valid() const {
        return is_finite(min) && is_finite(max) && min.x() <= max.x() && min.y() <= max.y();
    }
    bool degenerate() const { return width() <= 0.0 || height() <= 0.0; }

    bool contains(const Point2& p) const {
        return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() && p.y() <= max.y();
    }
    bool contains(const Rect& r) const { return contains(r.min) && contains(r.max); }

    /// Closed-set overlap: shared boundary counts.
    bool intersects(const Rect& r) const {
        return min.x() <= r.max.x() && r.min.x() <= max.x() &&
               min.y() <= r.max.y() && r.min.y() <= max.y();
    }
};

inline bool point_in_rect(const Point2& p, const Rect& r) { return r.contains(p); }

/// Clips the parametric segment a + t*(b-a), t in [0,1], against a closed
/// rectangle (Liang-Barsky slab test). Returns the parameter interval of the
/// intersection, or nullopt when the segment misses the rectangle. A
/// degenerate interval (entry == exit) means the segment grazes the boundary.
std::optional<std::pair<double, double>> clip_segment_to_rect(const Point2& a, const Point2& b,
                                                              const Rect& r);

inline bool segment_intersects_rect(const Point2& a, const Point2& b, const Rect& r) {
    return clip_segment_to_rect(a, b, r).has_value();
}

/// True iff the closed segment ab touches no obstacle rectangle.
bool segment_free(const Point2& a, const Point2& b, std::span<const Rect> obstacles);

/// Exact Euclidean distance between the closed segment ab and the closed
/// rectangle (0 when they intersect).
double segment_rect_distance(const Point2& a, const Point2& b, const Rect& r);

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace vlmrrt
