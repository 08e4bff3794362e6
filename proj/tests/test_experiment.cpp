#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "asyncbo/experiment.hpp"
#include "asyncbo/run_log.hpp"

using namespace asyncbo;
using nlohmann::json;

TEST_CASE("config parsing fills defaults from the problem catalog") {
    const json j{{"problem", "hartmann3"}};
    const ExperimentConfig config = parse_experiment_config(j);
    auto [problem, rc] = build_run(config, "async_hedge", 0);
    CHECK(problem.dimension == 3);
    CHECK(rc.batch.acq_size == 3);
    CHECK(rc.batch.explore_size == 3);
    CHECK(rc.batch.classif_size == 0);
    CHECK(rc.stop.max_evaluations == 150);
}

TEST_CASE("malformed config reports every offending key") {
    const json j{{"problem", "hartmann3"},
                 {"repeats", 0},
                 {"batch", {1, 2}},
                 {"mystery", 1},
                 {"modes", {"warp"}}};
    try {
        parse_experiment_config(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("repeats") != std::string::npos);
        CHECK(msg.find("batch") != std::string::npos);
        CHECK(msg.find("mystery") != std::string::npos);
        CHECK(msg.find("warp") != std::string::npos);
    }
}

TEST_CASE("experiment runs the seed ladder and writes the summary") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "asyncbo_test_experiment";
    fs::remove_all(dir);

    ExperimentConfig config;
    config.problem = "camel6";
    config.modes = {"random"};
    config.seed = 100;
    config.repeats = 3;
    config.max_evaluations = 8;
    config.out_dir = dir.string();

    const auto rows = run_experiment(config);
    REQUIRE(rows.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(rows[i].seed == 100 + static_cast<std::uint64_t>(i));
        CHECK(rows[i].evaluations_completed == 8);
        CHECK(rows[i].best_feasible.has_value());
        CHECK(fs::exists(rows[i].log_path));
    }
    CHECK(fs::exists(dir / "summary.csv"));

    std::ifstream summary(dir / "summary.csv");
    std::string header;
    std::getline(summary, header);
    CHECK(header ==
          "problem,mode,seed,evaluations_completed,best_feasible,wall_clock_simulated_s");
    int lines = 0;
    for (std::string line; std::getline(summary, line);) {
        if (!line.empty()) ++lines;
    }
    CHECK(lines == 3);
    fs::remove_all(dir);
}

TEST_CASE("summary rows are reproducible bitwise in simulated mode") {
    namespace fs = std::filesystem;
    const fs::path dir_a = fs::temp_directory_path() / "asyncbo_summary_a";
    const fs::path dir_b = fs::temp_directory_path() / "asyncbo_summary_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    ExperimentConfig config;
    config.problem = "camel6";
    config.modes = {"async_ei"};
    config.seed = 5;
    config.repeats = 2;
    config.max_evaluations = 10;
    config.inner_max_generations = 15;

    config.out_dir = dir_a.string();
    run_experiment(config);
    config.out_dir = dir_b.string();
    run_experiment(config);

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    CHECK(slurp(dir_a / "summary.csv") == slurp(dir_b / "summary.csv"));
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("plot-data export produces the four figure families") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "asyncbo_test_export";
    fs::remove_all(dir);

    ExperimentConfig config;
    config.problem = "camel6";
    config.modes = {"async_hedge"};
    config.seed = 3;
    config.repeats = 1;
    config.max_evaluations = 12;
    config.inner_max_generations = 15;
    config.out_dir = (dir / "runs").string();
    const auto rows = run_experiment(config);
    REQUIRE(rows.size() == 1);

    const auto written = export_plot_data({rows[0].log_path}, (dir / "plots").string());
    REQUIRE(written.size() == 4);
    for (const auto& path : written) {
        CHECK(fs::exists(path));
        std::ifstream in(path);
        std::string header, first;
        std::getline(in, header);
        CHECK_FALSE(header.empty());
    }

    // Portfolio CSV gets one row per hedge draw.
    std::ifstream portfolio(dir / "plots" / "portfolio.csv");
    int rows_in_portfolio = -1;  // header
    for (std::string line; std::getline(portfolio, line);) {
        if (!line.empty()) ++rows_in_portfolio;
    }
    CHECK(rows_in_portfolio > 0);
    fs::remove_all(dir);
}
