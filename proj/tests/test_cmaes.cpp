#include <doctest.h>

#include <cmath>
#include <random>

#include "asyncbo/benchmarks.hpp"
#include "asyncbo/cmaes.hpp"

using namespace asyncbo;

TEST_CASE("quadratic bowl is located precisely") {
    auto score = [](const Eigen::VectorXd& x) {
        return -(x.array() - 0.5).square().sum();
    };
    CmaesConfig config;
    config.seed = 11;
    config.restarts = 1;
    const auto res = maximize(score, 3, config);
    CHECK((res.x.array() - 0.5).abs().maxCoeff() < 1e-3);
    CHECK(res.value == doctest::Approx(0.0).epsilon(1e-5));
    CHECK_FALSE(res.flat_landscape);
}

TEST_CASE("constant landscape is flagged flat") {
    auto score = [](const Eigen::VectorXd&) { return 2.5; };
    CmaesConfig config;
    config.seed = 1;
    config.max_generations = 10;
    const auto res = maximize(score, 2, config);
    CHECK(res.flat_landscape);
    CHECK_FALSE(res.all_zero);
    CHECK(res.value == 2.5);
    CHECK(res.x.minCoeff() >= 0.0);
    CHECK(res.x.maxCoeff() <= 1.0);
}

TEST_CASE("all-zero landscape returns the reference argmax with a flag") {
    auto score = [](const Eigen::VectorXd&) { return 0.0; };
    CmaesConfig config;
    config.seed = 2;
    config.max_generations = 10;
    const auto res = maximize(score, 2, config);
    CHECK(res.all_zero);
    CHECK(res.flat_landscape);
    CHECK(res.value == 0.0);
}

TEST_CASE("fixed seed reproduces the result bitwise") {
    auto score = [](const Eigen::VectorXd& x) {
        return std::sin(5.0 * x(0)) + std::cos(3.0 * x(1)) - x.squaredNorm();
    };
    CmaesConfig config;
    config.seed = 77;
    config.restarts = 2;
    const auto a = maximize(score, 2, config);
    const auto b = maximize(score, 2, config);
    CHECK(a.value == b.value);
    CHECK(a.x == b.x);
}

TEST_CASE("every candidate respects the unit cube and the quality floor") {
    // The score records every x it is asked about; all must be in the cube,
    // and the result must beat a fresh 1000-point uniform reference sample.
    std::vector<Eigen::VectorXd> seen;
    auto score = [&seen](const Eigen::VectorXd& x) {
        seen.push_back(x);
        return std::sin(9.0 * x(0)) * std::cos(7.0 * x(1)) + 0.3 * x(0);
    };
    CmaesConfig config;
    config.seed = 5;
    config.restarts = 2;
    const auto res = maximize(score, 2, config);
    for (const auto& x : seen) {
        CHECK(x.minCoeff() >= 0.0);
        CHECK(x.maxCoeff() <= 1.0);
    }
    std::mt19937_64 rng(999);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double floor = -1e300;
    for (int i = 0; i < 1000; ++i) {
        Eigen::VectorXd x(2);
        x << unif(rng), unif(rng);
        floor = std::max(floor, std::sin(9.0 * x(0)) * std::cos(7.0 * x(1)) +
                                    0.3 * x(0));
    }
    CHECK(res.value >= floor);
}

TEST_CASE("negated eggholder reaches the deep corner basin on most seeds") {
    const auto& egg = find_problem("eggholder");
    auto score = [&egg](const Eigen::VectorXd& u) {
        return -egg.objective(egg.from_unit(u));
    };
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        CmaesConfig config;
        config.seed = seed;
        config.restarts = 3;
        const auto res = maximize(score, 2, config);
        if (res.value >= 959.0) ++hits;
    }
    CHECK(hits >= 4);
}
