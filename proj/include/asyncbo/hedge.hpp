#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "asyncbo/acquisition.hpp"

namespace asyncbo {

// Portfolio state for the Hedge sampler over {PI, EI, UCB}. Gains are
// cumulative binary rewards; the p.m.f. is softmax(eta * gains).
struct HedgeState {
    std::array<double, kPortfolioSize> gains{0.0, 0.0, 0.0};
    std::array<std::int64_t, kPortfolioSize> draws{0, 0, 0};
    std::int64_t reward_events = 0;   // feasible-and-new-best completions
    std::int64_t completed = 0;       // completed queries, drives eta
};

// eta(n) = sqrt(8 ln k / n).
double hedge_eta(std::int64_t n, int k);

// softmax(eta * gains) with max-gain subtraction; sums to 1, all entries > 0.
std::array<double, kPortfolioSize> hedge_pmf(
    const std::array<double, kPortfolioSize>& gains, double eta);

// p.m.f. using the state's own eta(completed).
std::array<double, kPortfolioSize> portfolio_pmf(const HedgeState& state);

// Adds a unit gain iff the completion was feasible and a new best.
// Exploration/classification-batch completions never call this.
void record_outcome(HedgeState& state, AcquisitionKind acquisition, bool feasible,
                    bool is_new_best);

// Inverse-CDF draw from an explicit p.m.f.
std::size_t sample_index(const std::array<double, kPortfolioSize>& pmf,
                         std::mt19937_64& rng);

AcquisitionKind sample_acquisition(HedgeState& state, std::mt19937_64& rng);

}  // namespace asyncbo
