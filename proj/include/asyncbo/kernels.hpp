#pragma once

#include <Eigen/Dense>
#include <string>

namespace asyncbo {

enum class KernelFamily { Matern12, Matern32, Matern52, SquaredExponential };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

// Stationary kernel with per-dimension length scales.
// k(a, a) == signal_variance for every family.
struct KernelSpec {
    KernelFamily family = KernelFamily::Matern52;
    double signal_variance = 1.0;      // theta_0^2
    Eigen::VectorXd length_scales;     // theta_i > 0, one per dimension

    int dimension() const { return static_cast<int>(length_scales.size()); }
    void validate() const;
};

// Scaled distance r with r^2 = sum_i ((a_i - b_i) / theta_i)^2.
double scaled_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& length_scales);

double kernel_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const KernelSpec& spec);

// Gram matrix K with K(i,j) = kernel_eval(X.row(i), X.row(j), spec).
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const KernelSpec& spec);

// Covariance vector between a query point and every row of X.
Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& X, const Eigen::VectorXd& x,
                              const KernelSpec& spec);

}  // namespace asyncbo
