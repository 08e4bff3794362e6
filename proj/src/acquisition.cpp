#include "asyncbo/acquisition.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace asyncbo {

namespace {
constexpr double kDegenerateStddev = 1e-12;
}

std::string to_string(AcquisitionKind kind) {
    switch (kind) {
        case AcquisitionKind::PI: return "pi";
        case AcquisitionKind::EI: return "ei";
        case AcquisitionKind::UCB: return "ucb";
    }
    return "unknown";
}

AcquisitionKind acquisition_from_string(const std::string& name) {
    if (name == "pi") return AcquisitionKind::PI;
    if (name == "ei") return AcquisitionKind::EI;
    if (name == "ucb") return AcquisitionKind::UCB;
    throw std::invalid_argument("unknown acquisition: " + name);
}

double normal_pdf(double z) {
    static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * M_PI);
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * M_SQRT1_2);
}

double improvement_score(double mean, double stddev, double f_best) {
    if (stddev < kDegenerateStddev) {
        if (mean > f_best) return std::numeric_limits<double>::infinity();
        if (mean < f_best) return -std::numeric_limits<double>::infinity();
        return 0.0;
    }
    return (mean - f_best) / stddev;
}

double acq_pi(double mean, double stddev, double f_best) {
    const double gamma = improvement_score(mean, stddev, f_best);
    if (std::isinf(gamma)) return gamma > 0 ? 1.0 : 0.0;
    return normal_cdf(gamma);
}

double acq_ei(double mean, double stddev, double f_best) {
    if (stddev < kDegenerateStddev) return 0.0;
    const double gamma = (mean - f_best) / stddev;
    return stddev * (gamma * normal_cdf(gamma) + normal_pdf(gamma));
}

double ucb_kappa(const UcbSchedule& schedule, std::int64_t n) {
    const double nn = static_cast<double>(std::max<std::int64_t>(n, 1));
    const double exponent = 0.5 * schedule.dimension + 2.0;
    const double gamma_n =
        2.0 * (exponent * std::log(nn) + std::log(M_PI * M_PI / (3.0 * schedule.delta)));
    return std::sqrt(schedule.nu * gamma_n);
}

double acq_ucb(double mean, double stddev, std::int64_t n, const UcbSchedule& schedule) {
    return mean + ucb_kappa(schedule, n) * stddev;
}

double KnownConstraintSet::indicator(const Eigen::VectorXd& x) const {
    for (const auto& c : constraints) {
        if (c.fn(x) > c.threshold) return 0.0;
    }
    return 1.0;
}

double constrained_acquisition(double raw, const Eigen::VectorXd& x,
                               const KnownConstraintSet& known, double p_feasible) {
    const double ind = known.indicator(x);
    if (ind == 0.0) return 0.0;
    return raw * p_feasible;
}

}  // namespace asyncbo
