#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "asyncbo/benchmarks.hpp"
#include "asyncbo/scheduler.hpp"

namespace asyncbo {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One experiment: a problem, one or more scheduler variants, a seed ladder.
// Parsed from a JSON config file; unknown or ill-typed keys are reported
// together in a ConfigError.
struct ExperimentConfig {
    std::string problem;
    std::vector<std::string> modes{"async_hedge"};
    std::uint64_t seed = 0;
    int repeats = 1;
    std::optional<std::array<int, 3>> batch;       // default: problem's listing
    std::optional<int> max_evaluations;            // default: problem's listing
    std::optional<double> max_wall_clock;
    bool realtime = false;
    double realtime_scale = 1.0;
    std::optional<std::pair<double, double>> duration;
    std::string kernel = "matern52";
    int inner_max_generations = 0;                 // 0 -> 100 * d
    int inner_restarts = 1;
    std::optional<double> eval_cutoff;
    std::string out_dir = "runs";

    // Synthetic constraints (raw coordinates).
    std::optional<DiskConstraint> unknown_disk;
    std::optional<DiskConstraint> known_disk;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

struct RunSummary {
    std::string problem;
    std::string mode;
    std::uint64_t seed = 0;
    int evaluations_completed = 0;
    std::optional<double> best_feasible;  // problem view (minimization)
    double wall_clock_simulated_s = 0.0;
    std::string log_path;
};

// Runs variants x repeats with seeds master_seed + i, writing one log per
// run and a summary.csv into out_dir. Returns the summary rows.
std::vector<RunSummary> run_experiment(const ExperimentConfig& config);

void write_summary_csv(const std::vector<RunSummary>& rows, const std::string& path);

// Builds the RunConfig / EngineProblem pair for one (mode, seed) cell.
std::pair<EngineProblem, RunConfig> build_run(const ExperimentConfig& config,
                                              const std::string& mode,
                                              std::uint64_t seed);

}  // namespace asyncbo
