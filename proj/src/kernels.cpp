#include "asyncbo/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace asyncbo {

std::string to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::Matern12: return "matern12";
        case KernelFamily::Matern32: return "matern32";
        case KernelFamily::Matern52: return "matern52";
        case KernelFamily::SquaredExponential: return "squared_exponential";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "matern12") return KernelFamily::Matern12;
    if (name == "matern32") return KernelFamily::Matern32;
    if (name == "matern52") return KernelFamily::Matern52;
    if (name == "squared_exponential" || name == "se") return KernelFamily::SquaredExponential;
    throw std::invalid_argument("unknown kernel family: " + name);
}

void KernelSpec::validate() const {
    if (!(signal_variance > 0.0)) {
        throw std::invalid_argument("kernel signal_variance must be positive");
    }
    if (length_scales.size() == 0) {
        throw std::invalid_argument("kernel length_scales must be non-empty");
    }
    for (Eigen::Index i = 0; i < length_scales.size(); ++i) {
        if (!(length_scales(i) > 0.0)) {
            throw std::invalid_argument("kernel length scales must be positive");
        }
    }
}

double scaled_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const Eigen::VectorXd& length_scales) {
    if (a.size() != b.size() || a.size() != length_scales.size()) {
        throw std::invalid_argument("kernel_eval: dimension mismatch");
    }
    const Eigen::ArrayXd diff = (a - b).array() / length_scales.array();
    return std::sqrt(diff.square().sum());
}

double kernel_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const KernelSpec& spec) {
    const double r = scaled_distance(a, b, spec.length_scales);
    const double s2 = spec.signal_variance;
    switch (spec.family) {
        case KernelFamily::Matern12:
            return s2 * std::exp(-r);
        case KernelFamily::Matern32: {
            const double t = std::sqrt(3.0) * r;
            return s2 * std::exp(-t) * (1.0 + t);
        }
        case KernelFamily::Matern52: {
            const double t = std::sqrt(5.0) * r;
            return s2 * std::exp(-t) * (1.0 + t + (5.0 / 3.0) * r * r);
        }
        case KernelFamily::SquaredExponential:
            return s2 * std::exp(-0.5 * r * r);
    }
    throw std::logic_error("unreachable kernel family");
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& X, const KernelSpec& spec) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = spec.signal_variance;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = kernel_eval(X.row(i), X.row(j), spec);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Eigen::VectorXd kernel_vector(const Eigen::MatrixXd& X, const Eigen::VectorXd& x,
                              const KernelSpec& spec) {
    const Eigen::Index n = X.rows();
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i) = kernel_eval(X.row(i), x, spec);
    }
    return k;
}

}  // namespace asyncbo
