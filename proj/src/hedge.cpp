#include "asyncbo/hedge.hpp"

#include <algorithm>
#include <cmath>

namespace asyncbo {

double hedge_eta(std::int64_t n, int k) {
    const double nn = static_cast<double>(std::max<std::int64_t>(n, 1));
    return std::sqrt(8.0 * std::log(static_cast<double>(k)) / nn);
}

std::array<double, kPortfolioSize> hedge_pmf(
    const std::array<double, kPortfolioSize>& gains, double eta) {
    const double max_gain = *std::max_element(gains.begin(), gains.end());
    std::array<double, kPortfolioSize> p{};
    double sum = 0.0;
    for (int j = 0; j < kPortfolioSize; ++j) {
        // Exponent floor keeps every entry strictly positive; exp underflows
        // to zero below about -745.
        p[j] = std::exp(std::max(eta * (gains[j] - max_gain), -700.0));
        sum += p[j];
    }
    for (int j = 0; j < kPortfolioSize; ++j) p[j] /= sum;
    return p;
}

std::array<double, kPortfolioSize> portfolio_pmf(const HedgeState& state) {
    return hedge_pmf(state.gains, hedge_eta(state.completed, kPortfolioSize));
}

void record_outcome(HedgeState& state, AcquisitionKind acquisition, bool feasible,
                    bool is_new_best) {
    if (feasible && is_new_best) {
        state.gains[static_cast<int>(acquisition)] += 1.0;
        state.reward_events += 1;
    }
}

std::size_t sample_index(const std::array<double, kPortfolioSize>& pmf,
                         std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double cdf = 0.0;
    for (std::size_t j = 0; j + 1 < pmf.size(); ++j) {
        cdf += pmf[j];
        if (u < cdf) return j;
    }
    return pmf.size() - 1;
}

AcquisitionKind sample_acquisition(HedgeState& state, std::mt19937_64& rng) {
    const auto pmf = portfolio_pmf(state);
    const std::size_t j = sample_index(pmf, rng);
    state.draws[j] += 1;
    return static_cast<AcquisitionKind>(j);
}

}  // namespace asyncbo
