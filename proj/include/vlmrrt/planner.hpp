#pragma once

#include "vlmrrt/env.hpp"
#include "vlmrrt/rng.hpp"
#include "vlmrrt/tree.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace vlmrrt {

struct PlannerConfig {
    double delta = 15.0;    // steering step, meters
    double epsilon = 1.0;   // goal tolerance, meters
    int max_iterations = 500;
    double gamma = 0.85;    // probability of an oracle-informed sampling step
    double sector_radius = 30.0;        // meters
    double sector_aperture_deg = 45.0;  // full angular width
    std::uint64_t rng_seed = 0;
    double rewire_radius = 40.0;  // RRT* only
    GoalMode goal_mode = GoalMode::StrictBall;

    void validate() const;
};

enum class PlanStatus { Success, IterationLimit };

std::string to_string(PlanStatus status);

struct PlanResult {
    PlanStatus status = PlanStatus::IterationLimit;
    std::vector<Point2> path;  // root first; empty unless Success
    int iterations_used = 0;
    int tree_size = 0;
    int vlm_queries = 0;
    double wall_time = 0.0;  // seconds

    double path_length() const;
    std::string to_json() const;
    static PlanResult from_json(const std::string& text);
};

/// Uniform point over a nondegenerate rectangle; draws x then y.
Point2 sample_state(Rng& rng, const Rect& bounds);

/// Moves from `nearest` toward `rand` by at most `delta`. When the two
/// coincide the result is `nearest` unchanged; callers treat that as a
/// degenerate sample and skip insertion.
Point2 steer(const Point2& nearest, const Point2& rand, double delta);

PlanResult plan_rrt(const Env& env, const PlannerConfig& cfg);

/// RRT with choose-parent and rewiring inside a fixed radius. Keeps refining
/// until the iteration budget is spent and then returns the cheapest
/// goal-reaching path; iterations_used reports the iteration at which a
/// feasible path first existed, which is the comparable quantity across
/// planners.
PlanResult plan_rrt_star(const Env& env, const PlannerConfig& cfg);

// Internal stream ids for deriving per-run RNGs from PlannerConfig::rng_seed.
// The gate stream is separate from the sample stream so a gamma = 0 guided
// run consumes sample draws exactly like plain RRT.
inline constexpr std::uint64_t kSampleStream = 0;
inline constexpr std::uint64_t kGateStream = 1;

}  // namespace vlmrrt
