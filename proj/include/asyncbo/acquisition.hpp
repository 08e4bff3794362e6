#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace asyncbo {

// Portfolio order is fixed: PI, EI, UCB.
enum class AcquisitionKind { PI = 0, EI = 1, UCB = 2 };
inline constexpr int kPortfolioSize = 3;

std::string to_string(AcquisitionKind kind);
AcquisitionKind acquisition_from_string(const std::string& name);

double normal_pdf(double z);
double normal_cdf(double z);

// (mean - f_best) / stddev, with +/-inf (or 0 on a tie) when stddev is
// below 1e-12.
double improvement_score(double mean, double stddev, double f_best);

// Phi(gamma), in [0,1].
double acq_pi(double mean, double stddev, double f_best);

// stddev * (gamma Phi(gamma) + phi(gamma)); exactly 0 at stddev = 0.
double acq_ei(double mean, double stddev, double f_best);

// kappa(n) = sqrt(nu * 2 log(n^(d/2+2) pi^2 / (3 delta))); increasing in n.
struct UcbSchedule {
    double nu = 1.0;
    double delta = 0.1;
    int dimension = 1;
};

double ucb_kappa(const UcbSchedule& schedule, std::int64_t n);
double acq_ucb(double mean, double stddev, std::int64_t n, const UcbSchedule& schedule);

// Known inequality constraint lambda(x) <= threshold, cheap to evaluate.
struct KnownConstraint {
    std::function<double(const Eigen::VectorXd&)> fn;
    double threshold = 0.0;
};

struct KnownConstraintSet {
    std::vector<KnownConstraint> constraints;

    bool empty() const { return constraints.empty(); }
    // 1 if every constraint holds at x, else 0.
    double indicator(const Eigen::VectorXd& x) const;
};

// a*(x) = raw * indicator(x) * p_feasible. `raw` must be nonnegative; UCB
// callers shift by a population baseline first (see scheduler).
double constrained_acquisition(double raw, const Eigen::VectorXd& x,
                               const KnownConstraintSet& known, double p_feasible);

}  // namespace asyncbo
