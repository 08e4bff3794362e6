#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>

#include "asyncbo/kernels.hpp"

namespace asyncbo {

// Thrown when (K + sigma^2 I) cannot be factorized even after jitter escalation.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double attempted_jitter)
        : std::runtime_error(what), attempted_jitter_(attempted_jitter) {}
    double attempted_jitter() const { return attempted_jitter_; }

private:
    double attempted_jitter_;
};

// Inputs closer than this (Euclidean, unit-cube coordinates) are treated as
// duplicates and merged, keeping the latest output.
inline constexpr double kDuplicateTolerance = 1e-9;

// Gaussian-process regression with a constant prior mean and cached Cholesky
// factorization of (K + sigma^2 I + jitter I). Immutable after fitting.
class GpModel {
public:
    // prior_mean defaults to the mean of `outputs`.
    static GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                       const KernelSpec& spec, double noise_variance,
                       std::optional<double> prior_mean = std::nullopt);

    // mean = mu0 + k(x)^T (K + s^2 I)^-1 (y - m); variance clamped to >= 0.
    std::pair<double, double> predict(const Eigen::VectorXd& x) const;

    double log_marginal_likelihood() const;

    const Eigen::MatrixXd& inputs() const { return inputs_; }
    const Eigen::VectorXd& outputs() const { return outputs_; }
    const KernelSpec& kernel() const { return kernel_; }
    double noise_variance() const { return noise_variance_; }
    double prior_mean() const { return prior_mean_; }
    double jitter() const { return jitter_; }
    const Eigen::MatrixXd& cholesky_factor() const { return chol_; }
    Eigen::Index size() const { return inputs_.rows(); }
    int dimension() const { return static_cast<int>(inputs_.cols()); }

private:
    GpModel() = default;

    Eigen::MatrixXd inputs_;
    Eigen::VectorXd outputs_;
    KernelSpec kernel_;
    double noise_variance_ = 0.0;
    double prior_mean_ = 0.0;
    double jitter_ = 0.0;            // diagonal actually added
    Eigen::MatrixXd chol_;           // lower-triangular L, L L^T = K + s^2 I + jitter I
    Eigen::VectorXd alpha_;          // (K + s^2 I)^-1 (y - m)
};

// Merge rows of X closer than kDuplicateTolerance; the later row's output wins.
void merge_duplicate_rows(Eigen::MatrixXd& X, Eigen::VectorXd& y);

// Hyperparameter search box, in the original (not log) parameterization.
struct HyperBounds {
    double signal_lo = 1e-3;
    double signal_hi = 1e3;
    double scale_lo = 1e-3;
    double scale_hi = 1e3;
};

// Default bounds for unit-cube inputs: length scales in [1e-3, 1e3] and
// signal variance in [1e-3, 1e3] times the sample variance of y.
HyperBounds default_hyper_bounds(const Eigen::VectorXd& outputs);

// Multi-start Nelder-Mead over log-parameters maximizing the log marginal
// likelihood. The returned spec's LML is >= the LML at every start point.
KernelSpec fit_hyperparameters(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                               KernelFamily family, const HyperBounds& bounds,
                               double noise_variance = 0.0, int n_starts = 8,
                               std::uint64_t seed = 0);

}  // namespace asyncbo
