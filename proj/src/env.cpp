#include "vlmrrt/env.hpp"

#include "vlmrrt/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace vlmrrt {

using nlohmann::json;

Env Env::make(const Rect& bounds, const Rect& start, const Rect& goal,
              std::vector<Rect> obstacles) {
    Env env;
    env.bounds = bounds;
    env.start = start;
    env.goal = goal;
    env.goal_centroid = goal.centroid();
    env.obstacles = std::move(obstacles);
    env.validate();
    return env;
}

void Env::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ParseError("invalid environment: " + what);
    };
    require(bounds.valid() && !bounds.degenerate(), "bounds must be a nondegenerate rectangle");
    require(start.valid() && !start.degenerate(), "start must be a nondegenerate rectangle");
    require(goal.valid() && !goal.degenerate(), "goal must be a nondegenerate rectangle");
    require(bounds.contains(start), "start outside bounds");
    require(bounds.contains(goal), "goal outside bounds");
    require((goal_centroid - goal.centroid()).norm() == 0.0,
            "goal_centroid must equal the goal centroid");
    require(!start.intersects(goal), "start and goal overlap");
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        const Rect& o = obstacles[i];
        const std::string tag = "obstacle " + std::to_string(i);
        require(o.valid() && !o.degenerate(), tag + " must be a nondegenerate rectangle");
        require(bounds.contains(o), tag + " outside bounds");
        require(!o.intersects(start), tag + " overlaps start");
        require(!o.intersects(goal), tag + " overlaps goal");
    }
}

Env Env::with_goal(const Rect& new_goal) const {
    Env out = *this;
    out.goal = new_goal;
    out.goal_centroid = new_goal.centroid();
    return out;
}

bool goal_reached(const Point2& p, const Env& env, double epsilon, GoalMode mode) {
    if ((p - env.goal_centroid).norm() <= epsilon) return true;
    return mode == GoalMode::BallOrRect && env.goal.contains(p);
}

bool grid_path_exists(const Env& env, double resolution) {
    const int nx = std::max(1, static_cast<int>(std::ceil(env.bounds.width() / resolution)));
    const int ny = std::max(1, static_cast<int>(std::ceil(env.bounds.height() / resolution)));

    auto cell_rect = [&](int ix, int iy) {
        Rect c;
        c.min = {env.bounds.min.x() + ix * resolution, env.bounds.min.y() + iy * resolution};
        c.max = {std::min(c.min.x() + resolution, env.bounds.max.x()),
                 std::min(c.min.y() + resolution, env.bounds.max.y())};
        return c;
    };
    auto cell_of = [&](const Point2& p) {
        int ix = static_cast<int>((p.x() - env.bounds.min.x()) / resolution);
        int iy = static_cast<int>((p.y() - env.bounds.min.y()) / resolution);
        return std::pair{std::clamp(ix, 0, nx - 1), std::clamp(iy, 0, ny - 1)};
    };

    std::vector<char> occupied(static_cast<std::size_t>(nx) * ny, 0);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Rect c = cell_rect(ix, iy);
            for (const Rect& o : env.obstacles) {
                if (c.intersects(o)) {
                    occupied[static_cast<std::size_t>(iy) * nx + ix] = 1;
                    break;
                }
            }
        }
    }

    const auto [sx, sy] = cell_of(env.start.centroid());
    const auto [gx, gy] = cell_of(env.goal_centroid);
    auto idx = [&](int x, int y) { return static_cast<std::size_t>(y) * nx + x; };
    if (occupied[idx(sx, sy)] || occupied[idx(gx, gy)]) return false;

    std::vector<char> seen(occupied.size(), 0);
    std::deque<std::pair<int, int>> queue{{sx, sy}};
    seen[idx(sx, sy)] = 1;
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        if (x == gx && y == gy) return true;
        const int nbr[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
        for (const auto& n : nbr) {
            if (n[0] < 0 || n[0] >= nx || n[1] < 0 || n[1] >= ny) continue;
            const auto k = idx(n[0], n[1]);
            if (!seen[k] && !occupied[k]) {
                seen[k] = 1;
                queue.emplace_back(n[0], n[1]);
            }
        }
    }
    return false;
}

namespace {

Rect random_rect_in(Rng& rng, const Rect& bounds, double side_min, double side_max) {
    const double w = std::min(rng.uniform(side_min, side_max), bounds.width());
    const double h = std::min(rng.uniform(side_min, side_max), bounds.height());
    const double x = rng.uniform(bounds.min.x(), bounds.max.x() - w);
    const double y = rng.uniform(bounds.min.y(), bounds.max.y() - h);
    return Rect{{x, y}, {x + w, y + h}};
}

}  // namespace

Scenario random_scenario(std::uint64_t seed, int n_obstacles, const ScenarioParams& params) {
    if (n_obstacles < 0) throw std::invalid_argument("n_obstacles must be >= 0");
    if (!params.bounds.valid() || params.bounds.degenerate())
        throw std::invalid_argument("bounds must be a nondegenerate rectangle");

    const double diag = (params.bounds.max - params.bounds.min).norm();
    const double separation = std::min(params.min_start_goal_separation, 0.45 * diag);

    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        Rng rng(split_seed(seed, attempt));

        const Rect start =
            random_rect_in(rng, params.bounds, params.region_side_min, params.region_side_max);
        Rect goal;
        bool goal_ok = false;
        for (int tries = 0; tries < 200 && !goal_ok; ++tries) {
            goal = random_rect_in(rng, params.bounds, params.region_side_min,
                                  params.region_side_max);
            goal_ok = !goal.intersects(start) &&
                      (goal.centroid() - start.centroid()).norm() >= separation;
        }
        if (!goal_ok) continue;

        std::vector<Rect> obstacles;
        obstacles.reserve(static_cast<std::size_t>(n_obstacles));
        bool obstacles_ok = true;
        for (int i = 0; i < n_obstacles && obstacles_ok; ++i) {
            bool placed = false;
            for (int tries = 0; tries < 100 && !placed; ++tries) {
                const Rect o = random_rect_in(rng, params.bounds, params.obstacle_side_min,
                                              params.obstacle_side_max);
                if (!o.intersects(start) && !o.intersects(goal)) {
                    obstacles.push_back(o);
                    placed = true;
                }
            }
            obstacles_ok = placed;
        }
        if (!obstacles_ok) continue;

        Env env = Env::make(params.bounds, start, goal, std::move(obstacles));
        if (!grid_path_exists(env, params.feasibility_resolution)) continue;

        Scenario scenario;
        scenario.env = std::move(env);
        scenario.seed = seed;
        return scenario;
    }
    throw InfeasibleScenario("no feasible scenario found in 100 attempts for seed " +
                             std::to_string(seed));
}

namespace {

json rect_to_json(const Rect& r) {
    return json::array({r.min.x(), r.min.y(), r.max.x(), r.max.y()});
}

Rect rect_from_json(const json& j, const std::string& field) {
    if (!j.is_array() || j.size() != 4 || !std::all_of(j.begin(), j.end(), [](const json& v) {
            return v.is_number();
        })) {
        throw ParseError("field '" + field + "' must be [min_x, min_y, max_x, max_y]");
    }
    Rect r{{j[0].get<double>(), j[1].get<double>()}, {j[2].get<double>(), j[3].get<double>()}};
    if (!r.valid()) throw ParseError("field '" + field + "' is not a valid rectangle");
    return r;
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; })) {
            throw ParseError("unknown key '" + key + "' in " + where);
        }
    }
}

}  // namespace

Scenario load_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("scenario JSON: top level must be an object");
    reject_unknown_keys(j, {"bounds", "start", "goal", "obstacles", "events", "seed"},
                        "scenario");
    for (const char* required : {"bounds", "start", "goal", "obstacles", "seed"}) {
        if (!j.contains(required))
            throw ParseError(std::string("missing required field '") + required + "'");
    }

    const Rect bounds = rect_from_json(j["bounds"], "bounds");
    const Rect start = rect_from_json(j["start"], "start");
    const Rect goal = rect_from_json(j["goal"], "goal");

    if (!j["obstacles"].is_array()) throw ParseError("field 'obstacles' must be an array");
    std::vector<Rect> obstacles;
    for (std::size_t i = 0; i < j["obstacles"].size(); ++i) {
        obstacles.push_back(
            rect_from_json(j["obstacles"][i], "obstacles[" + std::to_string(i) + "]"));
    }

    Scenario scenario;
    scenario.env = Env::make(bounds, start, goal, std::move(obstacles));

    if (j.contains("events")) {
        if (!j["events"].is_array()) throw ParseError("field 'events' must be an array");
        int prev_iteration = 0;
        for (std::size_t i = 0; i < j["events"].size(); ++i) {
            const json& ev = j["events"][i];
            const std::string where = "events[" + std::to_string(i) + "]";
            if (!ev.is_object()) throw ParseError(where + " must be an object");
            reject_unknown_keys(ev, {"at_iteration", "new_goal"}, where);
            if (!ev.contains("at_iteration") || !ev["at_iteration"].is_number_integer())
                throw ParseError(where + ".at_iteration must be an integer");
            if (!ev.contains("new_goal")) throw ParseError(where + ".new_goal missing");
            ScenarioEvent event;
            event.at_iteration = ev["at_iteration"].get<int>();
            event.new_goal = rect_from_json(ev["new_goal"], where + ".new_goal");
            if (event.at_iteration < 1) throw ParseError(where + ".at_iteration must be >= 1");
            if (event.at_iteration <= prev_iteration)
                throw ParseError("events must be strictly increasing in at_iteration");
            if (event.new_goal.degenerate())
                throw ParseError(where + ".new_goal must be nondegenerate");
            if (!scenario.env.bounds.contains(event.new_goal))
                throw ParseError(where + ".new_goal outside bounds");
            for (const Rect& o : scenario.env.obstacles) {
                if (o.intersects(event.new_goal))
                    throw ParseError(where + ".new_goal overlaps an obstacle");
            }
            prev_iteration = event.at_iteration;
            scenario.events.push_back(event);
        }
    }

    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
        throw ParseError("field 'seed' must be an unsigned integer");
    scenario.seed = j["seed"].get<std::uint64_t>();
    return scenario;
}

std::string save_scenario(const Scenario& scenario) {
    json j;
    j["bounds"] = rect_to_json(scenario.env.bounds);
    j["start"] = rect_to_json(scenario.env.start);
    j["goal"] = rect_to_json(scenario.env.goal);
    j["obstacles"] = json::array();
    for (const Rect& o : scenario.env.obstacles) j["obstacles"].push_back(rect_to_json(o));
    j["events"] = json::array();
    for (const ScenarioEvent& e : scenario.events) {
        j["events"].push_back({{"at_iteration", e.at_iteration},
                               {"new_goal", rect_to_json(e.new_goal)}});
    }
    j["seed"] = scenario.seed;
    return j.dump(2) + "\n";
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

void save_scenario_file(const Scenario& scenario, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scenario file: " + path);
    out << save_scenario(scenario);
}

}  // namespace vlmrrt
