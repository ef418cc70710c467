#pragma once

#include "vlmrrt/oracle.hpp"
#include "vlmrrt/planner.hpp"
#include "vlmrrt/vlm_planner.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vlmrrt {

enum class PlannerKind { Rrt, RrtStar, VlmRrt };

std::string to_string(PlannerKind kind);
std::optional<PlannerKind> planner_from_string(std::string_view s);

/// Oracle selection for a bench cell, parsed from specs such as "geometric",
/// "noisy:0.2", "replay:session.jsonl", "remote".
struct OracleSpec {
    enum class Kind { None, Geometric, Noisy, Replay, Remote };
    Kind kind = Kind::None;
    double p_wrong = 0.0;
    std::string session_path;

    static OracleSpec parse(const std::string& text);
    std::string label() const;
};

/// Builds a fresh oracle instance for one trial. Remote oracles read their
/// endpoint configuration from the environment.
std::unique_ptr<DirectionOracle> make_oracle(const OracleSpec& spec, const Env& env,
                                             double ray_length, std::uint64_t seed,
                                             PromptMode prompt_mode);

struct BenchCell {
    PlannerKind planner = PlannerKind::Rrt;
    OracleSpec oracle;
    double gamma = 0.85;  // used by VlmRrt only
    PromptMode prompt_mode = PromptMode::None;
};

struct TrialRecord {
    int scenario_id = 0;
    std::string planner;
    std::string oracle_kind;
    std::string prompt_mode;
    double gamma = 0.0;
    PlanStatus status = PlanStatus::IterationLimit;
    int iterations = 0;
    std::optional<double> path_length;  // present iff status == Success
    int vlm_queries = 0;
    double wall_time = 0.0;
};

struct BenchConfig {
    int n_trials = 100;
    std::vector<BenchCell> matrix;
    PlannerConfig base;
    ScenarioParams scenario;
    int n_obstacles_min = 8;
    int n_obstacles_max = 15;
    std::uint64_t seed = 1;
    int jobs = 1;

    BenchConfig() { base.goal_mode = GoalMode::BallOrRect; }
};

BenchConfig bench_config_from_json(const std::string& json_text);

struct CellSummary {
    std::string planner;
    std::string oracle_kind;
    std::string prompt_mode;
    double gamma = 0.0;
    int n = 0;
    int n_success = 0;
    double success_rate = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;  // Wilson 95%
    double mean_iterations_all = 0.0;      // failed trials count their full budget
    double mean_iterations_success = 0.0;  // successes only
    double mean_path_length = 0.0;         // successes only
    double mean_vlm_queries = 0.0;
};

struct BenchResult {
    std::vector<TrialRecord> records;    // scenario-major, cell order within
    std::vector<CellSummary> summary;
};

/// Paired Monte Carlo run: every cell sees the identical scenario for a given
/// scenario id, and per-trial sub-seeds are derived from (seed, index) so the
/// results are independent of `jobs`.
BenchResult run_bench(const BenchConfig& cfg);

std::string records_csv(const std::vector<TrialRecord>& records);
std::string summary_json(const BenchResult& result);
std::string summary_table(const BenchResult& result);

/// Per-event detection bookkeeping for goal-relocation runs.
struct RelocationLogEntry {
    int event_iteration = 0;
    bool fired = false;      // the run was still going when the event hit
    bool has_query = false;  // at least one oracle query happened in the window
    bool detected_first_query = false;  // first answer within 45 degrees of the
                                        // bearing to the relocated goal
    int queries_to_detection = -1;      // answers until detection, -1 if never
};

struct DynamicGoalResult {
    TrialRecord record;
    std::vector<RelocationLogEntry> log;
};

/// Runs a guided planner over a scenario with goal-relocation events. The
/// tree is retained across relocations by default; with `reset_tree` each
/// event restarts the tree from the depot with the remaining budget.
DynamicGoalResult run_dynamic_goal(const Scenario& scenario, const BenchCell& cell,
                                   const PlannerConfig& base, bool reset_tree = false);

/// Random solvable world plus goal-relocation events at the given iterations;
/// every relocated goal is obstacle-free and grid-reachable from the start.
Scenario random_relocation_scenario(std::uint64_t seed, int n_obstacles,
                                    const std::vector<int>& event_iterations,
                                    const ScenarioParams& params = {});

}  // namespace vlmrrt
