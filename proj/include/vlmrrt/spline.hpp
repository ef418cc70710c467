#pragma once

#include "vlmrrt/geometry.hpp"

#include <stdexcept>
#include <vector>

namespace vlmrrt {

class DegeneratePath : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Interpolating centripetal Catmull-Rom spline through 2D points. Local,
/// overshoot-free on sharp polylines, and exact at every control point.
/// Endpoints use reflected phantom neighbors.
class CatmullRom2 {
public:
    CatmullRom2() = default;  // empty curve

    /// Requires at least two points with distinct consecutive entries.
    explicit CatmullRom2(std::vector<Point2> points);

    int segment_count() const { return static_cast<int>(segments_.size()); }
    const std::vector<Point2>& control_points() const { return points_; }

    Point2 position(int segment, double u) const;    // u in [0, 1]
    Point2 derivative(int segment, double u) const;  // d position / du

    /// Arc length of one segment via adaptive Gauss-Legendre quadrature.
    double segment_length(int segment, double rel_tol = 1e-4) const;

private:
    struct Cubic {
        Point2 c0, c1, c2, c3;  // c0 + c1 u + c2 u^2 + c3 u^3
    };
    std::vector<Point2> points_;
    std::vector<Cubic> segments_;
};

/// Continuous tracking reference built from a planner path: the spline plus
/// horizon() = ceil(2.5 * l) samples at equal arc-length spacing from the
/// first to the last control point.
struct ReferencePath {
    std::vector<Point2> control_points;
    CatmullRom2 spline;
    double total_arc_length = 0.0;
    std::vector<Point2> samples;

    int horizon() const { return static_cast<int>(samples.size()); }
};

/// Throws DegeneratePath when the path has fewer than two points or repeats a
/// point consecutively.
ReferencePath fit_reference(const std::vector<Point2>& path);

}  // namespace vlmrrt
