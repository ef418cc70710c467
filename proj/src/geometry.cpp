#include "vlmrrt/geometry.hpp"

#include <algorithm>

namespace vlmrrt {

std::optional<std::pair<double, double>> clip_segment_to_rect(const Point2& a, const Point2& b,
                                                              const Rect& r) {
    const double dx = b.x() - a.x();
    const double dy = b.y() - a.y();

    double t_lo = 0.0;
    double t_hi = 1.0;

    // One slab per rectangle side: ax + t*dx >= min.x, <= max.x, same for y.
    const double d[4] = {dx, -dx, dy, -dy};
    const double q[4] = {r.min.x() - a.x(), a.x() - r.max.x(), r.min.y() - a.y(),
                         a.y() - r.max.y()};
    for (int i = 0; i < 4; ++i) {
        if (d[i] == 0.0) {
            if (q[i] > 0.0) return std::nullopt;  // parallel and outside the slab
        } else {
            const double t = q[i] / d[i];
            if (d[i] > 0.0) {
                t_lo = std::max(t_lo, t);
            } else {
                t_hi = std::min(t_hi, t);
            }
        }
    }
    if (t_lo > t_hi) return std::nullopt;
    return std::make_pair(t_lo, t_hi);
}

bool segment_free(const Point2& a, const Point2& b, std::span<const Rect> obstacles) {
    for (const Rect& o : obstacles) {
        if (segment_intersects_rect(a, b, o)) return false;
    }
    return true;
}

namespace {

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const Point2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double segment_segment_distance(const Point2& a, const Point2& b, const Point2& c,
                                const Point2& d) {
    const Point2 u = b - a, v = d - c, w = a - c;
    const double denom = u.x() * v.y() - u.y() * v.x();
    if (denom != 0.0) {
        const double s = (v.x() * w.y() - v.y() * w.x()) / denom;
        const double t = (u.x() * w.y() - u.y() * w.x()) / denom;
        if (s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0) return 0.0;
    }
    double best = point_segment_distance(a, c, d);
    best = std::min(best, point_segment_distance(b, c, d));
    best = std::min(best, point_segment_distance(c, a, b));
    best = std::min(best, point_segment_distance(d, a, b));
    return best;
}

}  // namespace

double segment_rect_distance(const Point2& a, const Point2& b, const Rect& r) {
    if (segment_intersects_rect(a, b, r)) return 0.0;
    const Point2 c0 = r.min;
    const Point2 c1{r.max.x(), r.min.y()};
    const Point2 c2 = r.max;
    const Point2 c3{r.min.x(), r.max.y()};
    double best = segment_segment_distance(a, b, c0, c1);
    best = std::min(best, segment_segment_distance(a, b, c1, c2));
    best = std::min(best, segment_segment_distance(a, b, c2, c3));
    best = std::min(best, segment_segment_distance(a, b, c3, c0));
    return best;
}

}  // namespace vlmrrt
