#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "asyncbo/gp.hpp"

namespace asyncbo {

// Probabilistic feasible/infeasible classifier: GP regression on labels
// encoded +1 / -1, squashed through a probit link. Immutable after fit.
class FeasibilityModel {
public:
    // If `spec` is absent the kernel hyperparameters are fitted here.
    static FeasibilityModel fit(const Eigen::MatrixXd& inputs,
                                const std::vector<bool>& labels,
                                double noise_variance = 0.1,
                                std::optional<KernelSpec> spec = std::nullopt,
                                std::uint64_t seed = 0);

    // Pr(feasible) = Phi(mu(x) / sqrt(var(x) + 1)).
    double prob_feasible(const Eigen::VectorXd& x) const;

    // Latent posterior variance; the third batch's exploration score.
    double classification_variance(const Eigen::VectorXd& x) const;

    const GpModel& latent() const { return latent_; }

private:
    explicit FeasibilityModel(GpModel latent) : latent_(std::move(latent)) {}
    GpModel latent_;
};

}  // namespace asyncbo
