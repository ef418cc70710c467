#include "vlmrrt/vlm_planner.hpp"

#include "vlmrrt/sector.hpp"
#include "vlmrrt/snapshot.hpp"

#include <chrono>
#include <cmath>

namespace vlmrrt {

PlanResult plan_vlm_rrt(const Env& env, const PlannerConfig& cfg, DirectionOracle& oracle) {
    return plan_vlm_rrt(env, cfg, oracle, {}, nullptr);
}

PlanResult plan_vlm_rrt(const Env& env, const PlannerConfig& cfg, DirectionOracle& oracle,
                        std::span<const ScenarioEvent> events, const OracleObserver& observer) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    Env current = env;
    Tree tree(env.start.centroid());

    // Gate draws come from their own stream so that gamma = 0 replays the
    // exact sample sequence of plan_rrt.
    Rng sample_rng(split_seed(cfg.rng_seed, kSampleStream));
    Rng gate_rng(split_seed(cfg.rng_seed, kGateStream));

    const double aperture = cfg.sector_aperture_deg * M_PI / 180.0;
    std::vector<std::pair<Point2, CompassDirection>> history;

    PlanResult result;
    std::size_t next_event = 0;
    int i = 0;
    while (i < cfg.max_iterations) {
        const int iteration = i + 1;
        while (next_event < events.size() && events[next_event].at_iteration == iteration) {
            current = current.with_goal(events[next_event].new_goal);
            ++next_event;
        }

        Point2 v_rand;
        const double alpha = gate_rng.uniform01();
        if (alpha <= cfg.gamma) {
            const int leaf = pick_leaf_node(tree, sample_rng);
            OracleQuery query;
            query.query_point = tree.vertex(leaf);
            query.goal_centroid = current.goal_centroid;
            query.history = history;
            if (oracle.needs_image()) {
                query.snapshot = std::make_shared<Snapshot>(
                    render_snapshot(current, &tree, leaf, nullptr));
            }

            OracleObservation obs;
            obs.iteration = iteration;
            obs.query_point = query.query_point;
            obs.goal_centroid = query.goal_centroid;
            ++result.vlm_queries;
            try {
                const OracleAnswer ans = oracle.answer(query);
                obs.direction = ans.direction;
                history.emplace_back(query.query_point, ans.direction);
                v_rand = sample_state_vlm(query.query_point, ans.direction, cfg.sector_radius,
                                          aperture, current, sample_rng);
            } catch (const OracleError&) {
                obs.failed = true;
                v_rand = sample_state(sample_rng, current.bounds);
            }
            if (observer) observer(obs);
        } else {
            v_rand = sample_state(sample_rng, current.bounds);
        }

        const int nearest = nearest_neighbor(tree, v_rand);
        const Point2 v_new = steer(tree.vertex(nearest), v_rand, cfg.delta);
        ++i;
        if ((v_new - tree.vertex(nearest)).norm() > 0.0 &&
            segment_free(tree.vertex(nearest), v_new, current.obstacles)) {
            const int idx = tree.add_vertex(v_new, nearest);
            if (goal_reached(v_new, current, cfg.epsilon, cfg.goal_mode)) {
                result.status = PlanStatus::Success;
                result.path = retrieve_plan(tree, idx);
                break;
            }
        }
    }

    result.iterations_used = i;
    result.tree_size = tree.size();
    result.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace vlmrrt
