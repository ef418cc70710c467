#include "vlmrrt/bench.hpp"

#include "vlmrrt/remote_oracle.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace vlmrrt {

using nlohmann::json;

std::string to_string(PlannerKind kind) {
    switch (kind) {
        case PlannerKind::Rrt: return "rrt";
        case PlannerKind::RrtStar: return "rrt-star";
        case PlannerKind::VlmRrt: return "vlm-rrt";
    }
    return "?";
}

std::optional<PlannerKind> planner_from_string(std::string_view s) {
    if (s == "rrt") return PlannerKind::Rrt;
    if (s == "rrt-star") return PlannerKind::RrtStar;
    if (s == "vlm-rrt") return PlannerKind::VlmRrt;
    return std::nullopt;
}

OracleSpec OracleSpec::parse(const std::string& text) {
    OracleSpec spec;
    if (text.empty() || text == "none" || text == "-") {
        spec.kind = Kind::None;
    } else if (text == "geometric") {
        spec.kind = Kind::Geometric;
    } else if (text.rfind("noisy:", 0) == 0) {
        spec.kind = Kind::Noisy;
        spec.p_wrong = std::stod(text.substr(6));
        if (!(spec.p_wrong >= 0.0 && spec.p_wrong <= 1.0))
            throw std::invalid_argument("noisy oracle probability must be in [0,1]");
    } else if (text.rfind("replay:", 0) == 0) {
        spec.kind = Kind::Replay;
        spec.session_path = text.substr(7);
    } else if (text == "remote") {
        spec.kind = Kind::Remote;
    } else {
        throw std::invalid_argument("unknown oracle spec: " + text);
    }
    return spec;
}

std::string OracleSpec::label() const {
    switch (kind) {
        case Kind::None: return "-";
        case Kind::Geometric: return "geometric";
        case Kind::Noisy: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "noisy(%g)", p_wrong);
            return buf;
        }
        case Kind::Replay: return "replay";
        case Kind::Remote: return "remote";
    }
    return "?";
}

std::unique_ptr<DirectionOracle> make_oracle(const OracleSpec& spec, const Env& env,
                                             double ray_length, std::uint64_t seed,
                                             PromptMode prompt_mode) {
    switch (spec.kind) {
        case OracleSpec::Kind::None:
            return nullptr;
        case OracleSpec::Kind::Geometric:
            return std::make_unique<GeometricOracle>(env, ray_length);
        case OracleSpec::Kind::Noisy:
            return std::make_unique<NoisyOracle>(env, spec.p_wrong, seed, ray_length);
        case OracleSpec::Kind::Replay:
            return std::make_unique<ReplayOracle>(load_session_file(spec.session_path));
        case OracleSpec::Kind::Remote: {
            RemoteOracleConfig cfg = RemoteOracleConfig::from_environment();
            cfg.prompt_mode = prompt_mode == PromptMode::None ? PromptMode::ZeroShot : prompt_mode;
            return std::make_unique<RemoteOracle>(cfg);
        }
    }
    return nullptr;
}

namespace {

// Stream tags for per-trial seed derivation.
constexpr std::uint64_t kPlannerSeedStream = 1;
constexpr std::uint64_t kObstacleCountStream = 2;
constexpr std::uint64_t kOracleSeedStream = 3;

TrialRecord run_cell(const Scenario& scenario, int scenario_id, const BenchCell& cell,
                     const PlannerConfig& base, std::uint64_t trial_seed) {
    PlannerConfig cfg = base;
    cfg.rng_seed = split_seed(trial_seed, kPlannerSeedStream);
    cfg.gamma = cell.gamma;

    PlanResult plan;
    switch (cell.planner) {
        case PlannerKind::Rrt:
            plan = plan_rrt(scenario.env, cfg);
            break;
        case PlannerKind::RrtStar:
            plan = plan_rrt_star(scenario.env, cfg);
            break;
        case PlannerKind::VlmRrt: {
            auto oracle = make_oracle(cell.oracle, scenario.env, cfg.sector_radius,
                                      split_seed(trial_seed, kOracleSeedStream),
                                      cell.prompt_mode);
            if (!oracle)
                throw std::invalid_argument("vlm-rrt cell needs an oracle");
            plan = plan_vlm_rrt(scenario.env, cfg, *oracle);
            break;
        }
    }

    TrialRecord rec;
    rec.scenario_id = scenario_id;
    rec.planner = to_string(cell.planner);
    rec.oracle_kind = cell.planner == PlannerKind::VlmRrt ? cell.oracle.label() : "-";
    rec.prompt_mode = std::string(to_string(cell.prompt_mode));
    rec.gamma = cell.planner == PlannerKind::VlmRrt ? cell.gamma : 0.0;
    rec.status = plan.status;
    rec.iterations = plan.iterations_used;
    if (plan.status == PlanStatus::Success) rec.path_length = plan.path_length();
    rec.vlm_queries = plan.vlm_queries;
    rec.wall_time = plan.wall_time;
    return rec;
}

void wilson_interval(int successes, int n, double& lo, double& hi) {
    if (n == 0) {
        lo = hi = 0.0;
        return;
    }
    const double z = 1.959963984540054;
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    lo = std::max(0.0, center - half);
    hi = std::min(1.0, center + half);
}

}  // namespace

BenchConfig bench_config_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("bench config JSON: ") + e.what());
    }
    BenchConfig cfg;
    cfg.n_trials = j.value("n_trials", cfg.n_trials);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.jobs = j.value("jobs", cfg.jobs);
    cfg.n_obstacles_min = j.value("n_obstacles_min", cfg.n_obstacles_min);
    cfg.n_obstacles_max = j.value("n_obstacles_max", cfg.n_obstacles_max);
    if (j.contains("bounds")) {
        const json& b = j["bounds"];
        if (!b.is_array() || b.size() != 4)
            throw ParseError("bench config: bounds must be [min_x, min_y, max_x, max_y]");
        cfg.scenario.bounds = Rect{{b[0].get<double>(), b[1].get<double>()},
                                   {b[2].get<double>(), b[3].get<double>()}};
    }
    if (j.contains("planner")) {
        const json& p = j["planner"];
        cfg.base.delta = p.value("delta", cfg.base.delta);
        cfg.base.epsilon = p.value("epsilon", cfg.base.epsilon);
        cfg.base.max_iterations = p.value("max_iterations", cfg.base.max_iterations);
        cfg.base.gamma = p.value("gamma", cfg.base.gamma);
        cfg.base.sector_radius = p.value("sector_radius", cfg.base.sector_radius);
        cfg.base.sector_aperture_deg =
            p.value("sector_aperture_deg", cfg.base.sector_aperture_deg);
        cfg.base.rewire_radius = p.value("rewire_radius", cfg.base.rewire_radius);
        if (p.contains("goal_mode")) {
            const std::string mode = p["goal_mode"].get<std::string>();
            if (mode == "strict-ball") cfg.base.goal_mode = GoalMode::StrictBall;
            else if (mode == "ball-or-rect") cfg.base.goal_mode = GoalMode::BallOrRect;
            else throw ParseError("bench config: unknown goal_mode '" + mode + "'");
        }
    }
    if (j.contains("matrix")) {
        cfg.matrix.clear();
        for (const json& c : j["matrix"]) {
            BenchCell cell;
            const auto planner = planner_from_string(c.value("planner", "rrt"));
            if (!planner) throw ParseError("bench config: unknown planner");
            cell.planner = *planner;
            cell.oracle = OracleSpec::parse(c.value("oracle", ""));
            cell.gamma = c.value("gamma", cfg.base.gamma);
            if (c.contains("prompt_mode")) {
                const auto mode = prompt_mode_from_string(c["prompt_mode"].get<std::string>());
                if (!mode) throw ParseError("bench config: unknown prompt_mode");
                cell.prompt_mode = *mode;
            }
            cfg.matrix.push_back(cell);
        }
    }
    return cfg;
}

BenchResult run_bench(const BenchConfig& cfg) {
    if (cfg.n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    if (cfg.matrix.empty()) throw std::invalid_argument("bench matrix is empty");
    if (cfg.n_obstacles_min < 0 || cfg.n_obstacles_max < cfg.n_obstacles_min)
        throw std::invalid_argument("bad obstacle count range");

    const std::size_t n_cells = cfg.matrix.size();
    BenchResult result;
    result.records.resize(static_cast<std::size_t>(cfg.n_trials) * n_cells);

    std::atomic<int> next_trial{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        while (true) {
            const int s = next_trial.fetch_add(1);
            if (s >= cfg.n_trials || failed.load()) break;
            try {
                const std::uint64_t trial_seed = split_seed(cfg.seed, static_cast<std::uint64_t>(s));
                const int span = cfg.n_obstacles_max - cfg.n_obstacles_min + 1;
                Rng count_rng(split_seed(trial_seed, kObstacleCountStream));
                const int n_obs = cfg.n_obstacles_min +
                                  static_cast<int>(count_rng.index(static_cast<std::size_t>(span)));
                const Scenario scenario = random_scenario(trial_seed, n_obs, cfg.scenario);
                for (std::size_t c = 0; c < n_cells; ++c) {
                    result.records[static_cast<std::size_t>(s) * n_cells + c] =
                        run_cell(scenario, s, cfg.matrix[c], cfg.base, trial_seed);
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                failure = e.what();
                failed.store(true);
            }
        }
    };

    const int jobs = std::max(1, cfg.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw std::runtime_error("bench trial failed: " + failure);

    // Per-cell aggregates.
    for (std::size_t c = 0; c < n_cells; ++c) {
        CellSummary cell;
        const BenchCell& bc = cfg.matrix[c];
        cell.planner = to_string(bc.planner);
        cell.oracle_kind = bc.planner == PlannerKind::VlmRrt ? bc.oracle.label() : "-";
        cell.prompt_mode = std::string(to_string(bc.prompt_mode));
        cell.gamma = bc.planner == PlannerKind::VlmRrt ? bc.gamma : 0.0;

        double iter_all = 0.0, iter_success = 0.0, len = 0.0, queries = 0.0;
        for (int s = 0; s < cfg.n_trials; ++s) {
            const TrialRecord& r = result.records[static_cast<std::size_t>(s) * n_cells + c];
            ++cell.n;
            iter_all += r.iterations;
            queries += r.vlm_queries;
            if (r.status == PlanStatus::Success) {
                ++cell.n_success;
                iter_success += r.iterations;
                len += *r.path_length;
            }
        }
        cell.success_rate = cell.n > 0 ? static_cast<double>(cell.n_success) / cell.n : 0.0;
        wilson_interval(cell.n_success, cell.n, cell.ci_lo, cell.ci_hi);
        cell.mean_iterations_all = cell.n > 0 ? iter_all / cell.n : 0.0;
        cell.mean_iterations_success = cell.n_success > 0 ? iter_success / cell.n_success : 0.0;
        cell.mean_path_length = cell.n_success > 0 ? len / cell.n_success : 0.0;
        cell.mean_vlm_queries = cell.n > 0 ? queries / cell.n : 0.0;
        result.summary.push_back(cell);
    }
    return result;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += "\"";
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::string records_csv(const std::vector<TrialRecord>& records) {
    std::ostringstream out;
    out << "scenario_id,planner,oracle_kind,prompt_mode,gamma,status,iterations,"
           "path_length,vlm_queries,wall_time\n";
    for (const TrialRecord& r : records) {
        out << r.scenario_id << "," << csv_field(r.planner) << "," << csv_field(r.oracle_kind)
            << "," << csv_field(r.prompt_mode) << "," << num(r.gamma) << ","
            << to_string(r.status) << "," << r.iterations << ","
            << (r.path_length ? num(*r.path_length) : "") << "," << r.vlm_queries << ","
            << num(r.wall_time) << "\n";
    }
    return out.str();
}

std::string summary_json(const BenchResult& result) {
    json j;
    j["cells"] = json::array();
    for (const CellSummary& c : result.summary) {
        j["cells"].push_back({
            {"planner", c.planner},
            {"oracle_kind", c.oracle_kind},
            {"prompt_mode", c.prompt_mode},
            {"gamma", c.gamma},
            {"n", c.n},
            {"n_success", c.n_success},
            {"success_rate", c.success_rate},
            {"ci95", {c.ci_lo, c.ci_hi}},
            {"mean_iterations_all", c.mean_iterations_all},
            {"mean_iterations_success", c.mean_iterations_success},
            {"mean_path_length", c.mean_path_length},
            {"mean_vlm_queries", c.mean_vlm_queries},
        });
    }
    return j.dump(2) + "\n";
}

std::string summary_table(const BenchResult& result) {
    std::ostringstream out;
    auto line = [&](const std::string& a, const std::string& b, const std::string& c,
                    const std::string& d, const std::string& e, const std::string& f) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%-10s %-14s %-10s %-16s %-18s %-20s\n", a.c_str(),
                      b.c_str(), c.c_str(), d.c_str(), e.c_str(), f.c_str());
        out << buf;
    };
    line("Algorithm", "Oracle", "Prompt", "Success Rate", "Avg. Iterations", "Avg. Path Length (m)");
    for (const CellSummary& c : result.summary) {
        char rate[48];
        std::snprintf(rate, sizeof(rate), "%.0f%% (%d/%d)", 100.0 * c.success_rate, c.n_success,
                      c.n);
        char iters[32], len[32];
        std::snprintf(iters, sizeof(iters), "%.1f", c.mean_iterations_success);
        std::snprintf(len, sizeof(len), "%.2f", c.mean_path_length);
        line(c.planner, c.oracle_kind, c.prompt_mode, rate, iters, len);
    }
    return out.str();
}

DynamicGoalResult run_dynamic_goal(const Scenario& scenario, const BenchCell& cell,
                                   const PlannerConfig& base, bool reset_tree) {
    if (cell.planner != PlannerKind::VlmRrt)
        throw std::invalid_argument("dynamic-goal runs need the guided planner");
    if (scenario.events.empty())
        throw std::invalid_argument("dynamic-goal scenario has no events");

    PlannerConfig cfg = base;
    cfg.rng_seed = split_seed(scenario.seed, kPlannerSeedStream);
    cfg.gamma = cell.gamma;

    DynamicGoalResult result;
    result.log.resize(scenario.events.size());
    for (std::size_t e = 0; e < scenario.events.size(); ++e)
        result.log[e].event_iteration = scenario.events[e].at_iteration;

    std::vector<OracleObservation> observations;
    const OracleObserver observer = [&](const OracleObservation& obs) {
        observations.push_back(obs);
    };

    PlanResult plan;
    auto oracle = make_oracle(cell.oracle, scenario.env, cfg.sector_radius,
                              split_seed(scenario.seed, kOracleSeedStream), cell.prompt_mode);
    if (!oracle) throw std::invalid_argument("dynamic-goal runs need an oracle");

    if (!reset_tree) {
        plan = plan_vlm_rrt(scenario.env, cfg, *oracle, scenario.events, observer);
    } else {
        // Reset mode: each relocation restarts the tree with the remaining
        // budget; observations keep global iteration numbers.
        Env env = scenario.env;
        int consumed = 0;
        std::size_t next_event = 0;
        while (true) {
            const int budget =
                next_event < scenario.events.size()
                    ? scenario.events[next_event].at_iteration - 1 - consumed
                    : cfg.max_iterations - consumed;
            PlanResult segment;
            if (budget > 0) {
                PlannerConfig seg_cfg = cfg;
                seg_cfg.max_iterations = budget;
                seg_cfg.rng_seed = split_seed(cfg.rng_seed, static_cast<std::uint64_t>(next_event));
                const int offset = consumed;
                segment = plan_vlm_rrt(env, seg_cfg, *oracle, {},
                                       [&](const OracleObservation& obs) {
                                           OracleObservation shifted = obs;
                                           shifted.iteration += offset;
                                           observations.push_back(shifted);
                                       });
                consumed += segment.iterations_used;
                plan.vlm_queries += segment.vlm_queries;
                plan.tree_size += segment.tree_size;
            }
            if (segment.status == PlanStatus::Success || next_event >= scenario.events.size() ||
                consumed >= cfg.max_iterations) {
                plan.status = segment.status;
                plan.path = segment.path;
                break;
            }
            env = env.with_goal(scenario.events[next_event].new_goal);
            ++next_event;
        }
        plan.iterations_used = consumed;
    }

    // Detection bookkeeping: for each fired event, examine the oracle answers
    // in its window (event iteration up to the next event) and find the first
    // one pointing within 45 degrees of the bearing to the relocated goal.
    for (std::size_t e = 0; e < scenario.events.size(); ++e) {
        RelocationLogEntry& entry = result.log[e];
        entry.fired = plan.iterations_used >= entry.event_iteration;
        if (!entry.fired) continue;
        const int window_end = e + 1 < scenario.events.size()
                                   ? scenario.events[e + 1].at_iteration
                                   : std::numeric_limits<int>::max();
        const Point2 new_goal = scenario.events[e].new_goal.centroid();
        int seen = 0;
        for (const OracleObservation& obs : observations) {
            if (obs.iteration < entry.event_iteration || obs.iteration >= window_end) continue;
            if (obs.failed) continue;
            ++seen;
            entry.has_query = true;
            const double bearing = std::atan2(new_goal.y() - obs.query_point.y(),
                                              new_goal.x() - obs.query_point.x());
            const double off = std::abs(wrap_angle(compass_angle(obs.direction) - bearing));
            if (off <= M_PI / 4.0 + 1e-12) {
                entry.queries_to_detection = seen;
                if (seen == 1) entry.detected_first_query = true;
                break;
            }
        }
    }

    TrialRecord rec;
    rec.scenario_id = 0;
    rec.planner = to_string(cell.planner);
    rec.oracle_kind = cell.oracle.label();
    rec.prompt_mode = std::string(to_string(cell.prompt_mode));
    rec.gamma = cell.gamma;
    rec.status = plan.status;
    rec.iterations = plan.iterations_used;
    if (plan.status == PlanStatus::Success) rec.path_length = plan.path_length();
    rec.vlm_queries = plan.vlm_queries;
    rec.wall_time = plan.wall_time;
    result.record = rec;
    return result;
}

Scenario random_relocation_scenario(std::uint64_t seed, int n_obstacles,
                                    const std::vector<int>& event_iterations,
                                    const ScenarioParams& params) {
    Scenario scenario = random_scenario(seed, n_obstacles, params);
    Rng rng(split_seed(seed, 77));
    int prev = 0;
    for (int it : event_iterations) {
        if (it <= prev) throw std::invalid_argument("event iterations must be increasing");
        prev = it;
        ScenarioEvent event;
        event.at_iteration = it;
        bool placed = false;
        for (int tries = 0; tries < 500 && !placed; ++tries) {
            const double side = rng.uniform(params.region_side_min, params.region_side_max);
            const double w = std::min(side, scenario.env.bounds.width());
            const double h = std::min(side, scenario.env.bounds.height());
            const double x = rng.uniform(scenario.env.bounds.min.x(),
                                         scenario.env.bounds.max.x() - w);
            const double y = rng.uniform(scenario.env.bounds.min.y(),
                                         scenario.env.bounds.max.y() - h);
            const Rect candidate{{x, y}, {x + w, y + h}};
            bool clear = true;
            for (const Rect& o : scenario.env.obstacles) {
                if (o.intersects(candidate)) {
                    clear = false;
                    break;
                }
            }
            if (!clear) continue;
            if (!grid_path_exists(scenario.env.with_goal(candidate),
                                  params.feasibility_resolution))
                continue;
            event.new_goal = candidate;
            placed = true;
        }
        if (!placed)
            throw InfeasibleScenario("could not place a relocated goal for seed " +
                                     std::to_string(seed));
        scenario.events.push_back(event);
    }
    return scenario;
}

}  // namespace vlmrrt
