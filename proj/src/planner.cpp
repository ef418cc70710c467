#include "vlmrrt/planner.hpp"

#include <json.hpp>

#include <chrono>
#include <limits>
#include <stdexcept>

namespace vlmrrt {

using nlohmann::json;

void PlannerConfig::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must be in [0,1]");
    if (!(sector_radius > 0.0)) throw std::invalid_argument("sector_radius must be > 0");
    if (!(sector_aperture_deg > 0.0 && sector_aperture_deg <= 360.0))
        throw std::invalid_argument("sector_aperture_deg must be in (0,360]");
    if (!(rewire_radius > 0.0)) throw std::invalid_argument("rewire_radius must be > 0");
}

std::string to_string(PlanStatus status) {
    return status == PlanStatus::Success ? "success" : "iteration_limit";
}

double PlanResult::path_length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
    return len;
}

std::string PlanResult::to_json() const {
    json j;
    j["status"] = vlmrrt::to_string(status);
    j["path"] = json::array();
    for (const Point2& p : path) j["path"].push_back({p.x(), p.y()});
    j["iterations_used"] = iterations_used;
    j["tree_size"] = tree_size;
    j["vlm_queries"] = vlm_queries;
    j["wall_time"] = wall_time;
    j["path_length"] = path_length();
    return j.dump(2) + "\n";
}

PlanResult PlanResult::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("plan result JSON: ") + e.what());
    }
    PlanResult r;
    const std::string status = j.at("status").get<std::string>();
    if (status == "success") {
        r.status = PlanStatus::Success;
    } else if (status == "iteration_limit") {
        r.status = PlanStatus::IterationLimit;
    } else {
        throw ParseError("plan result JSON: unknown status '" + status + "'");
    }
    for (const json& p : j.at("path")) {
        if (!p.is_array() || p.size() != 2) throw ParseError("plan result JSON: bad path point");
        r.path.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    r.iterations_used = j.at("iterations_used").get<int>();
    r.tree_size = j.at("tree_size").get<int>();
    r.vlm_queries = j.value("vlm_queries", 0);
    r.wall_time = j.value("wall_time", 0.0);
    return r;
}

Point2 sample_state(Rng& rng, const Rect& bounds) {
    const double x = rng.uniform(bounds.min.x(), bounds.max.x());
    const double y = rng.uniform(bounds.min.y(), bounds.max.y());
    return {x, y};
}

Point2 steer(const Point2& nearest, const Point2& rand, double delta) {
    const Point2 diff = rand - nearest;
    const double dist = diff.norm();
    if (dist <= delta) return rand;
    return nearest + (delta / dist) * diff;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

PlanResult plan_rrt(const Env& env, const PlannerConfig& cfg) {
    cfg.validate();
    const auto t0 = Clock::now();
    const Point2 root = env.start.centroid();
    Tree tree(root);
    Rng rng(split_seed(cfg.rng_seed, kSampleStream));

    PlanResult result;
    int i = 0;
    while (i < cfg.max_iterations) {
        const Point2 v_rand = sample_state(rng, env.bounds);
        const int nearest = nearest_neighbor(tree, v_rand);
        const Point2 v_new = steer(tree.vertex(nearest), v_rand, cfg.delta);
        ++i;  // every loop pass counts, rejected extensions included
        if ((v_new - tree.vertex(nearest)).norm() > 0.0 &&
            segment_free(tree.vertex(nearest), v_new, env.obstacles)) {
            const int idx = tree.add_vertex(v_new, nearest);
            if (goal_reached(v_new, env, cfg.epsilon, cfg.goal_mode)) {
                result.status = PlanStatus::Success;
                result.path = retrieve_plan(tree, idx);
                break;
            }
        }
    }
    result.iterations_used = i;
    result.tree_size = tree.size();
    result.wall_time = seconds_since(t0);
    return result;
}

PlanResult plan_rrt_star(const Env& env, const PlannerConfig& cfg) {
    cfg.validate();
    const auto t0 = Clock::now();
    const Point2 root = env.start.centroid();
    Tree tree(root);
    Rng rng(split_seed(cfg.rng_seed, kSampleStream));

    std::vector<int> goal_vertices;
    int first_feasible_iteration = 0;

    int i = 0;
    while (i < cfg.max_iterations) {
        const Point2 v_rand = sample_state(rng, env.bounds);
        const int nearest = nearest_neighbor(tree, v_rand);
        const Point2 v_new = steer(tree.vertex(nearest), v_rand, cfg.delta);
        ++i;
        if ((v_new - tree.vertex(nearest)).norm() == 0.0 ||
            !segment_free(tree.vertex(nearest), v_new, env.obstacles)) {
            continue;
        }

        const std::vector<int> neighbors = tree.near(v_new, cfg.rewire_radius);

        // Choose-parent: cheapest collision-free connection in the ball.
        int parent = nearest;
        double best_cost = tree.cost_from_root(nearest) + (v_new - tree.vertex(nearest)).norm();
        for (int n : neighbors) {
            const double c = tree.cost_from_root(n) + (v_new - tree.vertex(n)).norm();
            if (c < best_cost && segment_free(tree.vertex(n), v_new, env.obstacles)) {
                best_cost = c;
                parent = n;
            }
        }
        const int idx = tree.add_vertex(v_new, parent);

        // Rewire neighbors through the new vertex when that lowers their cost.
        for (int n : neighbors) {
            const double through = best_cost + (tree.vertex(n) - v_new).norm();
            if (through < tree.cost_from_root(n) &&
                segment_free(v_new, tree.vertex(n), env.obstacles)) {
                tree.rewire(n, idx);
            }
        }

        if (goal_reached(v_new, env, cfg.epsilon, cfg.goal_mode)) {
            if (goal_vertices.empty()) first_feasible_iteration = i;
            goal_vertices.push_back(idx);
        }
    }

    PlanResult result;
    if (!goal_vertices.empty()) {
        int best = goal_vertices.front();
        for (int v : goal_vertices) {
            if (tree.cost_from_root(v) < tree.cost_from_root(best)) best = v;
        }
        result.status = PlanStatus::Success;
        result.path = retrieve_plan(tree, best);
        result.iterations_used = first_feasible_iteration;
    } else {
        result.iterations_used = i;
    }
    result.tree_size = tree.size();
    result.wall_time = seconds_since(t0);
    return result;
}

}  // namespace vlmrrt
