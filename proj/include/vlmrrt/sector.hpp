#pragma once

#include "vlmrrt/env.hpp"
#include "vlmrrt/rng.hpp"
#include "vlmrrt/tree.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace vlmrrt {

/// Circular wedge used as the guided sampling region.
struct Sector {
    Point2 apex{0.0, 0.0};
    double direction = 0.0;  // world-frame radians, E = 0, counterclockwise
    double radius = 0.0;     // meters
    double aperture = 0.0;   // full angular width, radians

    bool contains(const Point2& p) const {
        const Point2 d = p - apex;
        if (d.norm() > radius) return false;
        const double off = wrap_angle(std::atan2(d.y(), d.x()) - direction);
        return std::abs(off) <= 0.5 * aperture;
    }
};

enum class CompassDirection { N, NE, E, SE, S, SW, W, NW };

/// Clockwise enumeration starting at North; also the tie-break order used by
/// scoring oracles.
inline constexpr std::array<CompassDirection, 8> kCompassClockwiseFromNorth = {
    CompassDirection::N,  CompassDirection::NE, CompassDirection::E,  CompassDirection::SE,
    CompassDirection::S,  CompassDirection::SW, CompassDirection::W,  CompassDirection::NW};

/// World-frame angle of a compass direction: E = 0, N = pi/2 (counterclockwise).
double compass_angle(CompassDirection d);

std::string_view compass_name(CompassDirection d);
std::optional<CompassDirection> compass_from_name(std::string_view name);

/// Compass direction whose angle is closest to `angle`.
CompassDirection nearest_compass(double angle);

/// Uniform choice among the child-free vertices of the tree.
int pick_leaf_node(const Tree& tree, Rng& rng);

/// Uniform point over (sector intersect bounds). Area-correct polar draws
/// (radius proportional to sqrt(u)) rejected against the world bounds; after
/// `max_rejections` misses falls back to a uniform draw over the whole
/// bounds. `fell_back`, when given, reports whether the fallback fired.
Point2 sample_state_vlm(const Point2& apex, CompassDirection d, double radius, double aperture,
                        const Env& env, Rng& rng, bool* fell_back = nullptr,
                        int max_rejections = 50);

}  // namespace vlmrrt
