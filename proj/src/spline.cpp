#include "vlmrrt/spline.hpp"

#include <algorithm>
#include <cmath>

namespace vlmrrt {

namespace {

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNode[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                               0.0,                 0.4058451513773972,  0.7415311855993945,
                               0.9491079123427585};
constexpr double kGlWeight[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                                 0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                                 0.1294849661688697};

template <typename F>
double gauss7(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < 7; ++k) acc += kGlWeight[k] * f(mid + half * kGlNode[k]);
    return half * acc;
}

template <typename F>
double adaptive_gauss(const F& f, double a, double b, double whole, double rel_tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss7(f, a, mid);
    const double right = gauss7(f, mid, b);
    const double refined = left + right;
    if (depth <= 0 || std::abs(refined - whole) <= rel_tol * std::abs(refined)) return refined;
    return adaptive_gauss(f, a, mid, left, rel_tol, depth - 1) +
           adaptive_gauss(f, mid, b, right, rel_tol, depth - 1);
}

}  // namespace

CatmullRom2::CatmullRom2(std::vector<Point2> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw DegeneratePath("spline needs at least two points");
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if ((points_[i] - points_[i - 1]).norm() == 0.0)
            throw DegeneratePath("consecutive path points must be distinct");
    }

    const auto n = points_.size();
    auto at = [&](std::ptrdiff_t i) -> Point2 {
        // Reflected phantom endpoints.
        if (i < 0) return 2.0 * points_[0] - points_[1];
        if (i >= static_cast<std::ptrdiff_t>(n)) return 2.0 * points_[n - 1] - points_[n - 2];
        return points_[static_cast<std::size_t>(i)];
    };

    segments_.reserve(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Point2 p0 = at(static_cast<std::ptrdiff_t>(i) - 1);
        const Point2 p1 = at(static_cast<std::ptrdiff_t>(i));
        const Point2 p2 = at(static_cast<std::ptrdiff_t>(i) + 1);
        const Point2 p3 = at(static_cast<std::ptrdiff_t>(i) + 2);

        // Centripetal knot spacing (alpha = 1/2).
        const double dt0 = std::sqrt((p1 - p0).norm());
        const double dt1 = std::sqrt((p2 - p1).norm());
        const double dt2 = std::sqrt((p3 - p2).norm());

        Point2 m1 = (p1 - p0) / dt0 - (p2 - p0) / (dt0 + dt1) + (p2 - p1) / dt1;
        Point2 m2 = (p2 - p1) / dt1 - (p3 - p1) / (dt1 + dt2) + (p3 - p2) / dt2;
        m1 *= dt1;
        m2 *= dt1;

        Cubic c;
        c.c0 = p1;
        c.c1 = m1;
        c.c2 = -3.0 * p1 + 3.0 * p2 - 2.0 * m1 - m2;
        c.c3 = 2.0 * p1 - 2.0 * p2 + m1 + m2;
        segments_.push_back(c);
    }
}

Point2 CatmullRom2::position(int segment, double u) const {
    const Cubic& c = segments_[static_cast<std::size_t>(segment)];
    return c.c0 + u * (c.c1 + u * (c.c2 + u * c.c3));
}

Point2 CatmullRom2::derivative(int segment, double u) const {
    const Cubic& c = segments_[static_cast<std::size_t>(segment)];
    return c.c1 + u * (2.0 * c.c2 + u * 3.0 * c.c3);
}

double CatmullRom2::segment_length(int segment, double rel_tol) const {
    auto speed = [&](double u) { return derivative(segment, u).norm(); };
    const double whole = gauss7(speed, 0.0, 1.0);
    return adaptive_gauss(speed, 0.0, 1.0, whole, rel_tol, 24);
}

ReferencePath fit_reference(const std::vector<Point2>& path) {
    ReferencePath ref{path, CatmullRom2(path), 0.0, {}};

    const int n_seg = ref.spline.segment_count();
    const int panels = 128;

    // Cumulative arc length on a fixed panel grid, used to invert s -> (seg, u).
    std::vector<double> cum(static_cast<std::size_t>(n_seg) * panels + 1, 0.0);
    std::size_t k = 0;
    for (int seg = 0; seg < n_seg; ++seg) {
        auto speed = [&](double u) { return ref.spline.derivative(seg, u).norm(); };
        for (int p = 0; p < panels; ++p, ++k) {
            const double a = static_cast<double>(p) / panels;
            const double b = static_cast<double>(p + 1) / panels;
            cum[k + 1] = cum[k] + gauss7(speed, a, b);
        }
    }

    double total = 0.0;
    for (int seg = 0; seg < n_seg; ++seg) total += ref.spline.segment_length(seg);
    ref.total_arc_length = total;

    const auto l = static_cast<double>(path.size());
    const int horizon = static_cast<int>(std::ceil(2.5 * l));

    ref.samples.resize(static_cast<std::size_t>(horizon));
    ref.samples.front() = path.front();
    ref.samples.back() = path.back();
    const double grid_total = cum.back();
    for (int t = 1; t + 1 < horizon; ++t) {
        const double s = grid_total * static_cast<double>(t) / (horizon - 1);
        // Locate the panel holding arc position s, then refine u inside it.
        const auto it = std::upper_bound(cum.begin(), cum.end(), s);
        const auto panel = std::min(static_cast<std::size_t>(it - cum.begin()) - 1,
                                    cum.size() - 2);
        const int seg = static_cast<int>(panel) / panels;
        const int p = static_cast<int>(panel) % panels;
        const double panel_len = cum[panel + 1] - cum[panel];
        const double a = static_cast<double>(p) / panels;
        const double b = static_cast<double>(p + 1) / panels;
        double u = panel_len > 0.0 ? a + (b - a) * (s - cum[panel]) / panel_len : a;

        auto speed = [&](double x) { return ref.spline.derivative(seg, x).norm(); };
        for (int newton = 0; newton < 3; ++newton) {
            const double arc_here = cum[panel] + gauss7(speed, a, u);
            const double v = speed(u);
            if (v <= 0.0) break;
            u = std::clamp(u - (arc_here - s) / v, a, b);
        }
        ref.samples[static_cast<std::size_t>(t)] = ref.spline.position(seg, u);
    }
    return ref;
}

}  // namespace vlmrrt
