#include "asyncbo/experiment.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace asyncbo {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "problem",     "modes",          "mode",        "seed",
    "repeats",     "batch",          "max_evaluations", "max_wall_clock",
    "realtime",    "realtime_scale", "duration",    "kernel",
    "inner_max_generations", "inner_restarts", "eval_cutoff", "out_dir",
    "unknown_disk", "known_disk"};

DiskConstraint parse_disk(const json& j, std::vector<std::string>& errors,
                          const std::string& key) {
    DiskConstraint disk;
    if (!j.is_object() || !j.contains("center") || !j.contains("radius")) {
        errors.push_back(key + ": expected {center: [..], radius: r}");
        return disk;
    }
    const auto center = j.at("center").get<std::vector<double>>();
    disk.center = Eigen::Map<const Eigen::VectorXd>(
        center.data(), static_cast<Eigen::Index>(center.size()));
    disk.radius = j.at("radius").get<double>();
    return disk;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& j) {
    std::vector<std::string> errors;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    for (const auto& [key, value] : j.items()) {
        if (!kKnownKeys.count(key)) errors.push_back("unknown key: " + key);
    }

    ExperimentConfig c;
    try {
        c.problem = j.at("problem").get<std::string>();
    } catch (const json::exception&) {
        errors.push_back("problem: required string");
    }
    if (j.contains("modes")) {
        try {
            c.modes = j.at("modes").get<std::vector<std::string>>();
        } catch (const json::exception&) {
            errors.push_back("modes: expected array of strings");
        }
    } else if (j.contains("mode")) {
        try {
            c.modes = {j.at("mode").get<std::string>()};
        } catch (const json::exception&) {
            errors.push_back("mode: expected string");
        }
    }
    for (const auto& m : c.modes) {
        try {
            SchedulerMode::parse(m);
        } catch (const std::exception&) {
            errors.push_back("modes: unknown mode '" + m + "'");
        }
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("repeats")) {
        c.repeats = j.at("repeats").get<int>();
        if (c.repeats < 1) errors.push_back("repeats: must be >= 1");
    }
    if (j.contains("batch")) {
        try {
            const auto b = j.at("batch").get<std::vector<int>>();
            if (b.size() != 3 || b[0] < 1 || b[1] < 0 || b[2] < 0) {
                errors.push_back("batch: expected [acq >= 1, explore >= 0, classif >= 0]");
            } else {
                c.batch = {b[0], b[1], b[2]};
            }
        } catch (const json::exception&) {
            errors.push_back("batch: expected array of 3 integers");
        }
    }
    if (j.contains("max_evaluations")) {
        c.max_evaluations = j.at("max_evaluations").get<int>();
    }
    if (j.contains("max_wall_clock")) {
        c.max_wall_clock = j.at("max_wall_clock").get<double>();
    }
    if (j.contains("realtime")) c.realtime = j.at("realtime").get<bool>();
    if (j.contains("realtime_scale")) {
        c.realtime_scale = j.at("realtime_scale").get<double>();
    }
    if (j.contains("duration")) {
        try {
            const auto d = j.at("duration").get<std::vector<double>>();
            if (d.size() != 2 || d[0] < 0 || d[1] < d[0]) {
                errors.push_back("duration: expected [lo, hi] with 0 <= lo <= hi");
            } else {
                c.duration = {d[0], d[1]};
            }
        } catch (const json::exception&) {
            errors.push_back("duration: expected array of 2 numbers");
        }
    }
    if (j.contains("kernel")) {
        c.kernel = j.at("kernel").get<std::string>();
        try {
            kernel_family_from_string(c.kernel);
        } catch (const std::exception&) {
            errors.push_back("kernel: unknown family '" + c.kernel + "'");
        }
    }
    if (j.contains("inner_max_generations")) {
        c.inner_max_generations = j.at("inner_max_generations").get<int>();
    }
    if (j.contains("inner_restarts")) c.inner_restarts = j.at("inner_restarts").get<int>();
    if (j.contains("eval_cutoff")) c.eval_cutoff = j.at("eval_cutoff").get<double>();
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("unknown_disk")) {
        c.unknown_disk = parse_disk(j.at("unknown_disk"), errors, "unknown_disk");
    }
    if (j.contains("known_disk")) {
        c.known_disk = parse_disk(j.at("known_disk"), errors, "known_disk");
    }

    if (!errors.empty()) {
        std::ostringstream msg;
        msg << "invalid config:";
        for (const auto& e : errors) msg << "\n  - " << e;
        throw ConfigError(msg.str());
    }
    return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_experiment_config(j);
}

std::pair<EngineProblem, RunConfig> build_run(const ExperimentConfig& config,
                                              const std::string& mode,
                                              std::uint64_t seed) {
    BenchmarkProblem problem = find_problem(config.problem);
    if (config.duration) problem.duration_range = *config.duration;

    EngineProblem engine_problem;
    if (config.unknown_disk || config.known_disk) {
        DiskConstraint unknown =
            config.unknown_disk.value_or(DiskConstraint{problem.lower, -1.0});
        ConstrainedProblem cp =
            add_synthetic_constrained(problem, unknown, config.known_disk);
        engine_problem = make_engine_problem(cp);
    } else {
        engine_problem = make_engine_problem(problem);
    }

    RunConfig rc;
    rc.mode = SchedulerMode::parse(mode);
    const std::array<int, 3> batch = config.batch.value_or(problem.default_batch);
    rc.batch = BatchConfig{batch[0], batch[1], batch[2]};
    rc.stop.max_evaluations =
        config.max_evaluations ? *config.max_evaluations : problem.max_evaluations;
    if (config.max_wall_clock) {
        rc.stop.max_wall_clock = *config.max_wall_clock;
        if (!config.max_evaluations) rc.stop.max_evaluations.reset();
    }
    rc.seed = seed;
    rc.kernel = kernel_family_from_string(config.kernel);
    rc.inner.max_generations = config.inner_max_generations;
    rc.inner.restarts = config.inner_restarts;
    rc.eval_cutoff = config.eval_cutoff;
    rc.realtime = config.realtime;
    rc.realtime_scale = config.realtime_scale;
    return {std::move(engine_problem), rc};
}

std::vector<RunSummary> run_experiment(const ExperimentConfig& config) {
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);

    struct Cell {
        std::string mode;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const auto& mode : config.modes) {
        for (int i = 0; i < config.repeats; ++i) {
            cells.push_back({mode, config.seed + static_cast<std::uint64_t>(i)});
        }
    }

    std::vector<RunSummary> rows(cells.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            const size_t idx = next.fetch_add(1);
            if (idx >= cells.size()) return;
            const Cell& cell = cells[idx];
            auto [problem, rc] = build_run(config, cell.mode, cell.seed);

            const std::string log_path =
                (fs::path(config.out_dir) /
                 (config.problem + "_" + cell.mode + "_seed" +
                  std::to_string(cell.seed) + ".jsonl"))
                    .string();
            std::ofstream out(log_path);
            RunLogWriter log(&out);
            const RunResult result = run(problem, rc, log, config.problem, true);

            RunSummary row;
            row.problem = config.problem;
            row.mode = cell.mode;
            row.seed = cell.seed;
            row.evaluations_completed = result.evaluations_completed;
            if (result.has_feasible_best) {
                row.best_feasible = -result.best_engine_value;  // back to minimization
            }
            row.wall_clock_simulated_s = result.clock_end;
            row.log_path = log_path;
            rows[idx] = std::move(row);
        }
    };

    const size_t workers = std::min<size_t>(
        cells.size(), std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    write_summary_csv(rows, (fs::path(config.out_dir) / "summary.csv").string());
    return rows;
}

void write_summary_csv(const std::vector<RunSummary>& rows, const std::string& path) {
    std::ofstream out(path);
    out << "problem,mode,seed,evaluations_completed,best_feasible,wall_clock_simulated_s\n";
    for (const auto& r : rows) {
        out << r.problem << "," << r.mode << "," << r.seed << ","
            << r.evaluations_completed << ",";
        if (r.best_feasible) {
            out << *r.best_feasible;
        }
        out << "," << r.wall_clock_simulated_s << "\n";
    }
}

}  // namespace asyncbo
