#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asyncbo/acquisition.hpp"
#include "asyncbo/benchmarks.hpp"
#include "asyncbo/cmaes.hpp"
#include "asyncbo/feasibility.hpp"
#include "asyncbo/gp.hpp"
#include "asyncbo/hedge.hpp"
#include "asyncbo/run_log.hpp"

namespace asyncbo {

enum class BatchKind { Acquisition = 0, Explore = 1, ExploreClassif = 2, Initial = 3 };
std::string to_string(BatchKind batch);

enum class EvalStatus { Pending, CompleteFeasible, CompleteInfeasible };

struct EvaluationRecord {
    std::int64_t id = 0;
    Eigen::VectorXd x;                            // unit-cube coordinates
    BatchKind batch = BatchKind::Initial;
    std::optional<AcquisitionKind> acquisition;   // present iff batch == Acquisition
    EvalStatus status = EvalStatus::Pending;
    std::optional<double> y;                      // engine view (maximize)
    double dispatched_at = 0.0;
    std::optional<double> completed_at;
    std::optional<double> hallucinated_y;
    int slot = -1;
};

struct BatchConfig {
    int acq_size = 1;
    int explore_size = 1;
    int classif_size = 0;
    int budget() const { return acq_size + explore_size + classif_size; }
};

enum class ModeKind { AsyncHedge, AsyncSingle, SyncBatch, RandomSearch };

struct SchedulerMode {
    ModeKind kind = ModeKind::AsyncHedge;
    AcquisitionKind acquisition = AcquisitionKind::EI;  // AsyncSingle / SyncBatch

    std::string name() const;
    static SchedulerMode parse(const std::string& name);
};

struct StopCondition {
    std::optional<int> max_evaluations;
    std::optional<double> max_wall_clock;  // simulated or scaled-real seconds
};

struct RunConfig {
    BatchConfig batch;
    SchedulerMode mode;
    StopCondition stop;
    std::uint64_t seed = 0;
    KernelFamily kernel = KernelFamily::Matern52;
    double objective_noise = 0.0;
    double classifier_noise = 0.1;
    UcbSchedule ucb;                 // dimension filled from the problem
    int hyperfit_every = 5;          // harvests between hyperparameter refits
    int initial_design = 0;          // 0 -> max(d + 1, 2 * budget)
    CmaesConfig inner;               // seed assigned per proposal
    std::optional<double> eval_cutoff;
    bool realtime = false;
    double realtime_scale = 1.0;     // sleep duration multiplier
};

struct RunResult {
    std::vector<EvaluationRecord> records;
    int evaluations_completed = 0;
    bool has_feasible_best = false;
    double best_engine_value = 0.0;  // maximize view
    double clock_end = 0.0;
};

class NoFeasibleData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The first under-filled batch in priority order; nullopt when every batch
// is full. `classifier_active` gates the third batch.
std::optional<BatchKind> select_batch(const std::array<int, 3>& in_flight,
                                      const BatchConfig& config,
                                      bool classifier_active = true);

// Training set of every completed point plus (x, posterior mean) rows for
// every pending point.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> hallucinate(
    const std::vector<EvaluationRecord>& records, const GpModel& objective_gp);

// Three-step refit: fit on feasible completions, predict the posterior mean
// at infeasible completions, refit with the imputed means included. Throws
// NoFeasibleData when no feasible completion exists.
GpModel interpolate_objective_gp(const std::vector<EvaluationRecord>& records,
                                 const KernelSpec& spec, double noise_variance);

// Runs one optimization problem to completion under `config`, streaming
// events to `log` (which may be backed by a null stream).
RunResult run(const EngineProblem& problem, const RunConfig& config,
              RunLogWriter& log, const std::string& problem_name = "",
              bool minimize_view = true);

// Reconstructs completed evaluations (and hedge gains) from a prior run log
// and continues the run. Unfinished dispatches in the log are re-proposed.
// Intended for real-time runs; the clock restarts at zero.
RunResult resume_run(const EngineProblem& problem, const RunConfig& config,
                     const std::vector<nlohmann::json>& prior_events,
                     RunLogWriter& log, const std::string& problem_name = "",
                     bool minimize_view = true);

// Latin hypercube over the unit cube.
Eigen::MatrixXd latin_hypercube_design(int n, int d, std::uint64_t seed);

}  // namespace asyncbo
