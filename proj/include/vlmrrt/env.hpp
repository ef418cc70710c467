#pragma once

#include "vlmrrt/geometry.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vlmrrt {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleScenario : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Goal-test semantics. StrictBall is the epsilon-ball test around the goal
/// centroid; BallOrRect additionally accepts any point inside the goal
/// rectangle (an explicitly-flagged relaxation, needed whenever epsilon is
/// small relative to the steering step).
enum class GoalMode { StrictBall, BallOrRect };

/// Bounded planar world. Immutable after construction; the goal can only be
/// replaced wholesale via with_goal() (used for goal-relocation scenarios).
struct Env {
    Rect bounds;
    Rect start;
    Rect goal;
    Point2 goal_centroid{0.0, 0.0};  // always the centroid of `goal`
    std::vector<Rect> obstacles;

    static Env make(const Rect& bounds, const Rect& start, const Rect& goal,
                    std::vector<Rect> obstacles);

    /// Throws ParseError when any structural invariant is violated.
    void validate() const;

    /// Copy of this environment with the goal rectangle replaced.
    Env with_goal(const Rect& new_goal) const;
};

struct ScenarioEvent {
    int at_iteration = 1;  // 1-based planner iteration at which the goal moves
    Rect new_goal;
};

struct Scenario {
    Env env;
    std::vector<ScenarioEvent> events;
    std::uint64_t seed = 0;
};

bool goal_reached(const Point2& p, const Env& env, double epsilon,
                  GoalMode mode = GoalMode::StrictBall);

/// Obstacle-size knobs for random worlds. These are tunable conventions, not
/// fixed constants of the problem.
struct ScenarioParams {
    Rect bounds{{0.0, 0.0}, {500.0, 500.0}};
    double region_side_min = 20.0;  // start/goal rectangles
    double region_side_max = 40.0;
    double obstacle_side_min = 20.0;
    double obstacle_side_max = 80.0;
    double min_start_goal_separation = 150.0;  // centroid distance
    double feasibility_resolution = 5.0;       // grid-BFS cell size, meters
};

/// Deterministic in (seed, n_obstacles, bounds/params). The returned world is
/// certified solvable by a coarse occupancy-grid BFS; generation retries with
/// perturbed sub-seeds and throws InfeasibleScenario after 100 attempts.
Scenario random_scenario(std::uint64_t seed, int n_obstacles, const ScenarioParams& params = {});

/// Conservative solvability check: free cells are those whose closed cell
/// rectangle touches no obstacle; BFS over 4-connectivity from the start
/// centroid cell to the goal centroid cell.
bool grid_path_exists(const Env& env, double resolution = 5.0);

Scenario load_scenario(const std::string& json_text);
std::string save_scenario(const Scenario& scenario);

Scenario load_scenario_file(const std::string& path);
void save_scenario_file(const Scenario& scenario, const std::string& path);

}  // namespace vlmrrt
