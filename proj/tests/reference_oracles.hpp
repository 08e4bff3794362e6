#pragma once

// Independent reference implementations used only by tests: dense-inverse GP
// predictions, re-typed benchmark formulas, and Monte-Carlo acquisition
// estimates. Deliberately written as a separate route from the library.

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "asyncbo/kernels.hpp"

namespace reference {

double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
              const asyncbo::KernelSpec& spec);

struct DensePrediction {
    double mean = 0.0;
    double variance = 0.0;
};

// Explicit matrix-inverse posterior, no Cholesky.
DensePrediction dense_gp_predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 const asyncbo::KernelSpec& spec, double noise_variance,
                                 double jitter, double prior_mean,
                                 const Eigen::VectorXd& query);

// log N(y; m, K + s^2 I + jitter I) via eigenvalue log-determinant.
double dense_log_marginal_likelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                     const asyncbo::KernelSpec& spec,
                                     double noise_variance, double jitter,
                                     double prior_mean);

// Benchmark objectives re-typed from their published formulas.
double benchmark_value(const std::string& name, const Eigen::VectorXd& x);

struct McEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

McEstimate mc_expected_improvement(double mean, double stddev, double f_best,
                                   int samples, std::uint64_t seed);
McEstimate mc_probability_of_improvement(double mean, double stddev, double f_best,
                                         int samples, std::uint64_t seed);

}  // namespace reference
