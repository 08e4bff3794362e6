#include "asyncbo/feasibility.hpp"

#include <cmath>
#include <stdexcept>

#include "asyncbo/acquisition.hpp"

namespace asyncbo {

FeasibilityModel FeasibilityModel::fit(const Eigen::MatrixXd& inputs,
                                       const std::vector<bool>& labels,
                                       double noise_variance,
                                       std::optional<KernelSpec> spec,
                                       std::uint64_t seed) {
    if (inputs.rows() < 1) {
        throw std::invalid_argument("fit_feasibility: need at least one labeled point");
    }
    if (static_cast<size_t>(inputs.rows()) != labels.size()) {
        throw std::invalid_argument("fit_feasibility: inputs/labels size mismatch");
    }
    Eigen::VectorXd targets(inputs.rows());
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        targets(i) = labels[static_cast<size_t>(i)] ? 1.0 : -1.0;
    }
    KernelSpec k;
    if (spec.has_value()) {
        k = *spec;
    } else {
        HyperBounds bounds = default_hyper_bounds(targets);
        k = fit_hyperparameters(inputs, targets, KernelFamily::Matern52, bounds,
                                noise_variance, 8, seed);
    }
    return FeasibilityModel(GpModel::fit(inputs, targets, k, noise_variance));
}

double FeasibilityModel::prob_feasible(const Eigen::VectorXd& x) const {
    const auto [mean, variance] = latent_.predict(x);
    return normal_cdf(mean / std::sqrt(variance + 1.0));
}

double FeasibilityModel::classification_variance(const Eigen::VectorXd& x) const {
    return latent_.predict(x).second;
}

}  // namespace asyncbo
