#pragma once

#include "vlmrrt/oracle.hpp"
#include "vlmrrt/planner.hpp"

#include <functional>
#include <span>

namespace vlmrrt {

/// One oracle interaction, reported to observers as it happens.
struct OracleObservation {
    int iteration = 0;  // 1-based planner iteration
    Point2 query_point{0.0, 0.0};
    Point2 goal_centroid{0.0, 0.0};
    CompassDirection direction = CompassDirection::N;  // valid when !failed
    bool failed = false;
};

using OracleObserver = std::function<void(const OracleObservation&)>;

/// RRT with probability-gamma oracle-guided sector sampling. Per iteration a
/// gate variable alpha ~ U(0,1) decides: when alpha <= gamma a uniformly
/// random leaf is picked, the oracle is asked for a compass direction, and
/// the sample is drawn from the sector at that leaf; otherwise the sample is
/// uniform over the bounds. Everything after sampling (nearest neighbor over
/// the whole tree, steering, collision check, goal test) matches plain RRT.
/// Oracle failures degrade the iteration to uniform sampling; they never
/// abort the run.
PlanResult plan_vlm_rrt(const Env& env, const PlannerConfig& cfg, DirectionOracle& oracle);

/// Extended entry point: goal-relocation events are applied at the start of
/// their 1-based iteration (events past the run's end are ignored), and every
/// oracle interaction is reported to `observer` when set.
PlanResult plan_vlm_rrt(const Env& env, const PlannerConfig& cfg, DirectionOracle& oracle,
                        std::span<const ScenarioEvent> events, const OracleObserver& observer);

}  // namespace vlmrrt
