#include "vlmrrt/bench.hpp"
#include "vlmrrt/remote_oracle.hpp"
#include "vlmrrt/snapshot.hpp"
#include "vlmrrt/tracker.hpp"
#include "vlmrrt/vlm_planner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace vlmrrt;

constexpr int kExitOk = 0;
constexpr int kExitIterationLimit = 1;
constexpr int kExitUsage = 2;
constexpr int kExitOracleFailure = 3;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

struct PlannerFlags {
    PlannerConfig cfg;
    std::string goal_mode = "strict-ball";

    void attach(CLI::App* cmd) {
        cmd->add_option("--delta", cfg.delta, "steering step size, meters")
            ->capture_default_str();
        cmd->add_option("--epsilon", cfg.epsilon, "goal tolerance, meters")
            ->capture_default_str();
        cmd->add_option("--iterations", cfg.max_iterations, "iteration budget")
            ->capture_default_str();
        cmd->add_option("--gamma", cfg.gamma, "probability of an oracle-informed step")
            ->capture_default_str();
        cmd->add_option("--sector-radius", cfg.sector_radius, "sector radius, meters")
            ->capture_default_str();
        cmd->add_option("--sector-aperture", cfg.sector_aperture_deg,
                        "sector full aperture, degrees")
            ->capture_default_str();
        cmd->add_option("--rewire-radius", cfg.rewire_radius, "rrt-star rewire radius, meters")
            ->capture_default_str();
        cmd->add_option("--seed", cfg.rng_seed, "rng seed")->capture_default_str();
        cmd->add_option("--goal-mode", goal_mode, "strict-ball or ball-or-rect")
            ->check(CLI::IsMember({"strict-ball", "ball-or-rect"}))
            ->capture_default_str();
    }

    PlannerConfig resolve() const {
        PlannerConfig out = cfg;
        out.goal_mode = goal_mode == "ball-or-rect" ? GoalMode::BallOrRect
                                                    : GoalMode::StrictBall;
        return out;
    }
};

struct ModelFlags {
    LtiModel model;
    double q_weight = 0.9;
    double r_weight = 0.1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--dt", model.dt, "sampling interval, seconds")->capture_default_str();
        cmd->add_option("--drag", model.drag, "air resistance coefficient")
            ->capture_default_str();
        cmd->add_option("--mass", model.mass, "agent mass, kg")->capture_default_str();
        cmd->add_option("--u-max", model.u_max, "per-axis input bound, newtons")
            ->capture_default_str();
        cmd->add_option("--v-max", model.v_max, "per-axis velocity cap, m/s")
            ->capture_default_str();
        cmd->add_option("--q-weight", q_weight, "tracking cost weight (Q = w*I)")
            ->capture_default_str();
        cmd->add_option("--r-weight", r_weight, "input cost weight (R = w*I)")
            ->capture_default_str();
    }

    LtiModel resolve() const {
        LtiModel out = model;
        out.u_min = -out.u_max;
        return out;
    }
};

PlanResult run_planner(const std::string& algo, const Scenario& scenario,
                       const PlannerConfig& cfg, const std::string& oracle_spec,
                       const std::string& prompt_mode_name, std::ostream* session_out,
                       int* vlm_exit) {
    const auto kind = planner_from_string(algo);
    if (!kind) throw std::invalid_argument("unknown algorithm: " + algo);
    if (*kind == PlannerKind::Rrt) return plan_rrt(scenario.env, cfg);
    if (*kind == PlannerKind::RrtStar) return plan_rrt_star(scenario.env, cfg);

    const OracleSpec spec = OracleSpec::parse(oracle_spec);
    const auto mode = prompt_mode_from_string(prompt_mode_name);
    if (!mode) throw std::invalid_argument("unknown prompt mode: " + prompt_mode_name);
    std::unique_ptr<DirectionOracle> oracle;
    try {
        oracle = make_oracle(spec, scenario.env, cfg.sector_radius,
                             split_seed(cfg.rng_seed, 3), *mode);
    } catch (const OracleError& e) {
        std::cerr << "oracle setup failed: " << e.what() << "\n";
        *vlm_exit = kExitOracleFailure;
        return {};
    }
    if (!oracle) throw std::invalid_argument("vlm-rrt needs --oracle");

    if (session_out) {
        RecordingOracle recorder(*oracle, *session_out);
        return plan_vlm_rrt(scenario.env, cfg, recorder, scenario.events, nullptr);
    }
    return plan_vlm_rrt(scenario.env, cfg, *oracle, scenario.events, nullptr);
}

int cmd_scenario_gen(const std::string& out_path, std::uint64_t seed, int n_obstacles,
                     const std::string& bounds_csv, const std::string& relocations) {
    ScenarioParams params;
    if (!bounds_csv.empty()) {
        const auto parts = split(bounds_csv, ',');
        if (parts.size() != 4)
            throw std::invalid_argument("--bounds expects min_x,min_y,max_x,max_y");
        params.bounds = Rect{{std::stod(parts[0]), std::stod(parts[1])},
                             {std::stod(parts[2]), std::stod(parts[3])}};
    }
    Scenario scenario;
    if (relocations.empty()) {
        scenario = random_scenario(seed, n_obstacles, params);
    } else {
        std::vector<int> iterations;
        for (const auto& s : split(relocations, ',')) iterations.push_back(std::stoi(s));
        scenario = random_relocation_scenario(seed, n_obstacles, iterations, params);
    }
    const std::string text = save_scenario(scenario);
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
    } else {
        write_file(out_path, text);
        std::cout << "scenario with " << scenario.env.obstacles.size() << " obstacles -> "
                  << out_path << "\n";
    }
    return kExitOk;
}

int finish_plan(const PlanResult& plan, const Scenario& scenario, const std::string& out_path,
                bool do_track, const ModelFlags& model_flags,
                const std::string& track_out_path, const std::string& figure_path) {
    if (!out_path.empty()) write_file(out_path, plan.to_json());
    std::cout << "status=" << to_string(plan.status) << " iterations=" << plan.iterations_used
              << " tree_size=" << plan.tree_size << " vlm_queries=" << plan.vlm_queries;
    if (plan.status == PlanStatus::Success) {
        std::cout << " path_length=" << plan.path_length();
    }
    std::cout << "\n";

    if (!figure_path.empty()) {
        write_file(figure_path,
                   export_figure(scenario.env, nullptr,
                                 plan.path.empty() ? nullptr : &plan.path));
    }

    if (plan.status != PlanStatus::Success) return kExitIterationLimit;

    if (do_track) {
        LtiModel model = model_flags.resolve();
        TrackResult tracked =
            track(plan, scenario.env, model,
                  model_flags.q_weight * Eigen::Matrix2d::Identity(),
                  model_flags.r_weight * Eigen::Matrix2d::Identity());
        if (!track_out_path.empty()) write_file(track_out_path, tracked.to_json());
        std::cout << "track status=" << to_string(tracked.status)
                  << " mean_error=" << tracked.mean_tracking_error
                  << " max_error=" << tracked.max_tracking_error << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2D sampling-based planning with oracle-guided sector sampling, "
                 "QP trajectory tracking, and a Monte Carlo bench"};
    app.require_subcommand(1);

    // scenario-gen
    auto* gen = app.add_subcommand("scenario-gen", "generate a random solvable scenario");
    std::string gen_out;
    std::uint64_t gen_seed = 1;
    int gen_obstacles = 10;
    std::string gen_bounds, gen_relocations;
    gen->add_option("--out", gen_out, "output path (default stdout)");
    gen->add_option("--seed", gen_seed, "scenario seed")->capture_default_str();
    gen->add_option("--n-obstacles", gen_obstacles, "obstacle count")->capture_default_str();
    gen->add_option("--bounds", gen_bounds, "world rectangle min_x,min_y,max_x,max_y");
    gen->add_option("--relocations", gen_relocations,
                    "comma list of iterations at which the goal relocates");

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "run a planner on a scenario");
    std::string plan_scenario, plan_algo = "vlm-rrt", plan_oracle = "geometric";
    std::string plan_prompt = "-", plan_out, plan_track_out, plan_figure;
    bool plan_do_track = false;
    PlannerFlags plan_flags;
    ModelFlags plan_model;
    plan_cmd->add_option("--scenario", plan_scenario, "scenario JSON path")->required();
    plan_cmd->add_option("--algo", plan_algo, "rrt | rrt-star | vlm-rrt")
        ->check(CLI::IsMember({"rrt", "rrt-star", "vlm-rrt"}))
        ->capture_default_str();
    plan_cmd->add_option("--oracle", plan_oracle,
                         "geometric | noisy:p | replay:file | remote")
        ->capture_default_str();
    plan_cmd->add_option("--prompt-mode", plan_prompt, "zero-shot | few-shot | cot")
        ->capture_default_str();
    plan_cmd->add_option("--out", plan_out, "plan result JSON path");
    plan_cmd->add_flag("--track", plan_do_track, "also track the planned path");
    plan_cmd->add_option("--track-out", plan_track_out, "tracking report JSON path");
    plan_cmd->add_option("--figure", plan_figure, "SVG figure path");
    plan_flags.attach(plan_cmd);
    plan_model.attach(plan_cmd);

    // track
    auto* track_cmd = app.add_subcommand("track", "track a planned path with the QP controller");
    std::string track_scenario, track_plan, track_out, track_dump_qp;
    ModelFlags track_model;
    track_cmd->add_option("--scenario", track_scenario, "scenario JSON path")->required();
    track_cmd->add_option("--plan", track_plan, "plan result JSON path")->required();
    track_cmd->add_option("--out", track_out, "tracking report JSON path");
    track_cmd->add_option("--dump-qp", track_dump_qp, "write the condensed H and f as text");
    track_model.attach(track_cmd);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo planner comparison");
    std::string bench_config_path, bench_planners = "rrt,rrt-star,vlm-rrt";
    std::string bench_oracle = "geometric", bench_prompt = "-", bench_gamma_sweep;
    std::string bench_csv, bench_json, bench_table;
    std::string bench_dynamic_relocations;
    int bench_trials = -1, bench_jobs = -1, bench_obs_min = -1, bench_obs_max = -1;
    std::uint64_t bench_seed = 0;
    bool bench_seed_set = false, bench_dynamic = false, bench_reset_tree = false;
    double bench_dynamic_gamma = -1.0;
    PlannerFlags bench_flags;
    bench_flags.goal_mode = "ball-or-rect";
    bench_cmd->add_option("--config", bench_config_path, "bench config JSON path");
    bench_cmd->add_option("--trials", bench_trials, "scenarios per cell");
    bench_cmd->add_option_function<std::uint64_t>(
        "--bench-seed",
        [&](const std::uint64_t& v) {
            bench_seed = v;
            bench_seed_set = true;
        },
        "master seed for scenario generation");
    bench_cmd->add_option("--jobs", bench_jobs, "worker threads");
    bench_cmd->add_option("--planners", bench_planners, "comma list of planners")
        ->capture_default_str();
    bench_cmd->add_option("--oracle", bench_oracle, "oracle for vlm-rrt cells")
        ->capture_default_str();
    bench_cmd->add_option("--prompt-mode", bench_prompt, "prompt mode for remote cells")
        ->capture_default_str();
    bench_cmd->add_option("--gamma-sweep", bench_gamma_sweep,
                          "comma list of gamma values, one vlm-rrt cell each");
    bench_cmd->add_option("--n-obstacles-min", bench_obs_min, "minimum obstacle count");
    bench_cmd->add_option("--n-obstacles-max", bench_obs_max, "maximum obstacle count");
    bench_cmd->add_option("--out-csv", bench_csv, "trial records CSV path");
    bench_cmd->add_option("--out-json", bench_json, "summary JSON path");
    bench_cmd->add_option("--out-table", bench_table, "text table path (also printed)");
    bench_cmd->add_flag("--dynamic-goal", bench_dynamic,
                        "run the goal-relocation experiment instead of the planner matrix");
    bench_cmd->add_option("--relocations", bench_dynamic_relocations,
                          "event iterations for --dynamic-goal")
        ->capture_default_str();
    bench_cmd->add_flag("--reset-tree", bench_reset_tree,
                        "restart the tree at each relocation (--dynamic-goal)");
    bench_cmd->add_option("--dynamic-gamma", bench_dynamic_gamma,
                          "gamma for --dynamic-goal cells");
    bench_flags.attach(bench_cmd);

    // render
    auto* render_cmd = app.add_subcommand("render", "render a scenario to PNG or SVG");
    std::string render_scenario, render_out, render_plan;
    int render_size = 512;
    render_cmd->add_option("--scenario", render_scenario, "scenario JSON path")->required();
    render_cmd->add_option("--out", render_out, "output .png or .svg path")->required();
    render_cmd->add_option("--plan", render_plan, "plan result JSON to overlay (SVG only)");
    render_cmd->add_option("--size", render_size, "image size, pixels")->capture_default_str();

    // record-oracle
    auto* record_cmd =
        app.add_subcommand("record-oracle", "run the guided planner and record the session");
    std::string record_scenario, record_oracle = "geometric", record_prompt = "-";
    std::string record_session, record_out;
    PlannerFlags record_flags;
    record_cmd->add_option("--scenario", record_scenario, "scenario JSON path")->required();
    record_cmd->add_option("--oracle", record_oracle, "oracle to record")
        ->capture_default_str();
    record_cmd->add_option("--prompt-mode", record_prompt, "prompt mode for remote oracles")
        ->capture_default_str();
    record_cmd->add_option("--session", record_session, "session JSONL output path")->required();
    record_cmd->add_option("--out", record_out, "plan result JSON path");
    record_flags.attach(record_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            return cmd_scenario_gen(gen_out, gen_seed, gen_obstacles, gen_bounds,
                                    gen_relocations);
        }

        if (plan_cmd->parsed()) {
            const Scenario scenario = load_scenario_file(plan_scenario);
            int vlm_exit = kExitOk;
            const PlanResult plan = run_planner(plan_algo, scenario, plan_flags.resolve(),
                                                plan_oracle, plan_prompt, nullptr, &vlm_exit);
            if (vlm_exit != kExitOk) return vlm_exit;
            std::string track_out_path = plan_track_out;
            if (plan_do_track && track_out_path.empty() && !plan_out.empty())
                track_out_path = plan_out + ".track.json";
            return finish_plan(plan, scenario, plan_out, plan_do_track, plan_model,
                               track_out_path, plan_figure);
        }

        if (track_cmd->parsed()) {
            const Scenario scenario = load_scenario_file(track_scenario);
            const PlanResult plan = PlanResult::from_json(read_file(track_plan));
            if (plan.status != PlanStatus::Success) {
                std::cerr << "plan did not succeed; nothing to track\n";
                return kExitIterationLimit;
            }
            if (!track_dump_qp.empty()) {
                MpcProblem problem;
                problem.model = track_model.resolve();
                problem.reference = fit_reference(plan.path);
                problem.x_init << plan.path.front().x(), plan.path.front().y(), 0.0, 0.0;
                problem.position_bounds = scenario.env.bounds;
                problem.Q = track_model.q_weight * Eigen::Matrix2d::Identity();
                problem.R = track_model.r_weight * Eigen::Matrix2d::Identity();
                write_file(track_dump_qp, qp_to_text(build_qp(problem).qp));
            }
            const TrackResult tracked =
                track(plan, scenario.env, track_model.resolve(),
                      track_model.q_weight * Eigen::Matrix2d::Identity(),
                      track_model.r_weight * Eigen::Matrix2d::Identity());
            if (!track_out.empty()) write_file(track_out, tracked.to_json());
            std::cout << "track status=" << to_string(tracked.status)
                      << " mean_error=" << tracked.mean_tracking_error
                      << " max_error=" << tracked.max_tracking_error << "\n";
            return kExitOk;
        }

        if (bench_cmd->parsed()) {
            BenchConfig cfg;
            if (!bench_config_path.empty())
                cfg = bench_config_from_json(read_file(bench_config_path));
            // Flags override the config file, which overrides built-ins.
            if (bench_trials >= 0) cfg.n_trials = bench_trials;
            if (bench_seed_set) cfg.seed = bench_seed;
            if (bench_jobs >= 0) cfg.jobs = bench_jobs;
            if (bench_obs_min >= 0) cfg.n_obstacles_min = bench_obs_min;
            if (bench_obs_max >= 0) cfg.n_obstacles_max = bench_obs_max;
            for (const auto* opt :
                 {"--delta", "--epsilon", "--iterations", "--gamma", "--sector-radius",
                  "--sector-aperture", "--rewire-radius", "--seed", "--goal-mode"}) {
                if (bench_cmd->count(opt) > 0) {
                    cfg.base = bench_flags.resolve();
                    break;
                }
            }
            if (bench_config_path.empty()) cfg.base = bench_flags.resolve();

            if (bench_dynamic) {
                std::vector<int> relocations{8, 16, 24};
                if (!bench_dynamic_relocations.empty()) {
                    relocations.clear();
                    for (const auto& s : split(bench_dynamic_relocations, ','))
                        relocations.push_back(std::stoi(s));
                }
                BenchCell cell;
                cell.planner = PlannerKind::VlmRrt;
                cell.oracle = OracleSpec::parse(bench_oracle);
                cell.gamma = bench_dynamic_gamma > 0 ? bench_dynamic_gamma : cfg.base.gamma;
                int fired = 0, detected = 0, with_query = 0, succeeded = 0;
                for (int s = 0; s < cfg.n_trials; ++s) {
                    const std::uint64_t seed = split_seed(cfg.seed, static_cast<std::uint64_t>(s));
                    Rng count_rng(split_seed(seed, 2));
                    const int span = cfg.n_obstacles_max - cfg.n_obstacles_min + 1;
                    const int n_obs =
                        cfg.n_obstacles_min + static_cast<int>(count_rng.index(span));
                    const Scenario scenario =
                        random_relocation_scenario(seed, n_obs, relocations, cfg.scenario);
                    const DynamicGoalResult run =
                        run_dynamic_goal(scenario, cell, cfg.base, bench_reset_tree);
                    if (run.record.status == PlanStatus::Success) ++succeeded;
                    for (const RelocationLogEntry& entry : run.log) {
                        if (!entry.fired) continue;
                        ++fired;
                        if (entry.has_query) {
                            ++with_query;
                            if (entry.detected_first_query) ++detected;
                        }
                    }
                }
                const double rate = with_query > 0 ? static_cast<double>(detected) / with_query
                                                   : 0.0;
                std::ostringstream summary;
                summary << "{\n  \"scenarios\": " << cfg.n_trials
                        << ",\n  \"events_fired\": " << fired
                        << ",\n  \"events_with_query\": " << with_query
                        << ",\n  \"detected_first_query\": " << detected
                        << ",\n  \"detection_rate\": " << rate
                        << ",\n  \"runs_succeeded\": " << succeeded << "\n}\n";
                if (!bench_json.empty()) write_file(bench_json, summary.str());
                std::cout << summary.str();
                return kExitOk;
            }

            if (cfg.matrix.empty() || bench_cmd->count("--planners") > 0 ||
                bench_cmd->count("--gamma-sweep") > 0 || bench_cmd->count("--oracle") > 0) {
                cfg.matrix.clear();
                const auto prompt = prompt_mode_from_string(bench_prompt);
                if (!prompt) throw std::invalid_argument("unknown prompt mode");
                if (!bench_gamma_sweep.empty()) {
                    for (const auto& g : split(bench_gamma_sweep, ',')) {
                        BenchCell cell;
                        cell.planner = PlannerKind::VlmRrt;
                        cell.oracle = OracleSpec::parse(bench_oracle);
                        cell.gamma = std::stod(g);
                        cell.prompt_mode = *prompt;
                        cfg.matrix.push_back(cell);
                    }
                } else {
                    for (const auto& name : split(bench_planners, ',')) {
                        const auto kind = planner_from_string(name);
                        if (!kind) throw std::invalid_argument("unknown planner: " + name);
                        BenchCell cell;
                        cell.planner = *kind;
                        if (*kind == PlannerKind::VlmRrt) {
                            cell.oracle = OracleSpec::parse(bench_oracle);
                            cell.gamma = cfg.base.gamma;
                            cell.prompt_mode = *prompt;
                        }
                        cfg.matrix.push_back(cell);
                    }
                }
            }

            const BenchResult result = run_bench(cfg);
            if (!bench_csv.empty()) write_file(bench_csv, records_csv(result.records));
            if (!bench_json.empty()) write_file(bench_json, summary_json(result));
            const std::string table = summary_table(result);
            if (!bench_table.empty()) write_file(bench_table, table);
            std::cout << table;
            return kExitOk;
        }

        if (render_cmd->parsed()) {
            const Scenario scenario = load_scenario_file(render_scenario);
            std::vector<Point2> path;
            if (!render_plan.empty())
                path = PlanResult::from_json(read_file(render_plan)).path;
            if (render_out.size() >= 4 &&
                render_out.compare(render_out.size() - 4, 4, ".svg") == 0) {
                write_file(render_out, export_figure(scenario.env, nullptr,
                                                     path.empty() ? nullptr : &path));
            } else {
                write_png_file(render_snapshot(scenario.env, nullptr, std::nullopt, nullptr,
                                               render_size),
                               render_out);
            }
            std::cout << "wrote " << render_out << "\n";
            return kExitOk;
        }

        if (record_cmd->parsed()) {
            const Scenario scenario = load_scenario_file(record_scenario);
            std::ofstream session(record_session);
            if (!session) throw std::runtime_error("cannot write " + record_session);
            int vlm_exit = kExitOk;
            const PlanResult plan =
                run_planner("vlm-rrt", scenario, record_flags.resolve(), record_oracle,
                            record_prompt, &session, &vlm_exit);
            if (vlm_exit != kExitOk) return vlm_exit;
            if (!record_out.empty()) write_file(record_out, plan.to_json());
            std::cout << "recorded " << plan.vlm_queries << " oracle queries -> "
                      << record_session << "\n";
            return plan.status == PlanStatus::Success ? kExitOk : kExitIterationLimit;
        }
    } catch (const OracleError& e) {
        std::cerr << "oracle failure: " << e.what() << "\n";
        return kExitOracleFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
