#include "vlmrrt/sector.hpp"

#include "vlmrrt/planner.hpp"

#include <cmath>

namespace vlmrrt {

double compass_angle(CompassDirection d) {
    switch (d) {
        case CompassDirection::E: return 0.0;
        case CompassDirection::NE: return 0.25 * M_PI;
        case CompassDirection::N: return 0.5 * M_PI;
        case CompassDirection::NW: return 0.75 * M_PI;
        case CompassDirection::W: return M_PI;
        case CompassDirection::SW: return -0.75 * M_PI;
        case CompassDirection::S: return -0.5 * M_PI;
        case CompassDirection::SE: return -0.25 * M_PI;
    }
    return 0.0;
}

std::string_view compass_name(CompassDirection d) {
    switch (d) {
        case CompassDirection::N: return "N";
        case CompassDirection::NE: return "NE";
        case CompassDirection::E: return "E";
        case CompassDirection::SE: return "SE";
        case CompassDirection::S: return "S";
        case CompassDirection::SW: return "SW";
        case CompassDirection::W: return "W";
        case CompassDirection::NW: return "NW";
    }
    return "?";
}

std::optional<CompassDirection> compass_from_name(std::string_view name) {
    for (CompassDirection d : kCompassClockwiseFromNorth) {
        if (name == compass_name(d)) return d;
    }
    return std::nullopt;
}

CompassDirection nearest_compass(double angle) {
    CompassDirection best = CompassDirection::N;
    double best_off = std::abs(wrap_angle(angle - compass_angle(best)));
    for (CompassDirection d : kCompassClockwiseFromNorth) {
        const double off = std::abs(wrap_angle(angle - compass_angle(d)));
        if (off < best_off) {
            best_off = off;
            best = d;
        }
    }
    return best;
}

int pick_leaf_node(const Tree& tree, Rng& rng) {
    const std::vector<int> leaves = tree.leaves();
    if (leaves.empty()) return 0;  // only possible for a childless root
    return leaves[rng.index(leaves.size())];
}

Point2 sample_state_vlm(const Point2& apex, CompassDirection d, double radius, double aperture,
                        const Env& env, Rng& rng, bool* fell_back, int max_rejections) {
    const double heading = compass_angle(d);
    for (int attempt = 0; attempt < max_rejections; ++attempt) {
        const double angle = heading + (rng.uniform01() - 0.5) * aperture;
        const double rho = radius * std::sqrt(rng.uniform01());
        const Point2 p = apex + rho * Point2{std::cos(angle), std::sin(angle)};
        if (env.bounds.contains(p)) {
            if (fell_back) *fell_back = false;
            return p;
        }
    }
    if (fell_back) *fell_back = true;
    return sample_state(rng, env.bounds);
}

}  // namespace vlmrrt
