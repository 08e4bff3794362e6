#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

namespace asyncbo {

// CMA-ES over the unit cube [0,1]^d, maximizing. All proposals are clipped
// into the cube; a seeded uniform reference sample gives a quality floor
// (the returned value is never below the reference-sample maximum).
struct CmaesConfig {
    int population_size = 0;    // 0 -> 4 + floor(3 ln d)
    int max_generations = 0;    // 0 -> 100 * d
    double initial_sigma = 0.3;
    int restarts = 1;
    std::uint64_t seed = 0;
    int reference_samples = 1000;
};

struct MaximizeResult {
    Eigen::VectorXd x;
    double value = 0.0;
    bool flat_landscape = false;  // every evaluated score identical
    bool all_zero = false;        // every evaluated score exactly 0
};

using ScoreFn = std::function<double(const Eigen::VectorXd&)>;

MaximizeResult maximize(const ScoreFn& score, int dimension, const CmaesConfig& config);

}  // namespace asyncbo
