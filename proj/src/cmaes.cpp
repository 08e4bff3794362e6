#include "asyncbo/cmaes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace asyncbo {
namespace {

struct Tracker {
    Eigen::VectorXd best_x;
    double best_value = -std::numeric_limits<double>::infinity();
    double min_seen = std::numeric_limits<double>::infinity();
    double max_seen = -std::numeric_limits<double>::infinity();

    void observe(const Eigen::VectorXd& x, double v) {
        min_seen = std::min(min_seen, v);
        max_seen = std::max(max_seen, v);
        if (v > best_value) {
            best_value = v;
            best_x = x;
        }
    }
};

Eigen::VectorXd clip_unit(Eigen::VectorXd x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = std::clamp(x(i), 0.0, 1.0);
    return x;
}

void run_cma(const ScoreFn& score, int d, int lambda, int max_gens, double sigma0,
             Eigen::VectorXd mean, std::mt19937_64& rng, Tracker& tracker) {
    const int mu = lambda / 2;
    Eigen::VectorXd weights(mu);
    for (int i = 0; i < mu; ++i) {
        weights(i) = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
    }
    weights /= weights.sum();
    const double mu_eff = 1.0 / weights.squaredNorm();

    const double cs = (mu_eff + 2.0) / (d + mu_eff + 5.0);
    const double ds =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (d + 1.0)) - 1.0) + cs;
    const double cc = (4.0 + mu_eff / d) / (d + 4.0 + 2.0 * mu_eff / d);
    const double c1 = 2.0 / ((d + 1.3) * (d + 1.3) + mu_eff);
    const double cmu = std::min(
        1.0 - c1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((d + 2.0) * (d + 2.0) + mu_eff));
    const double chi_n = std::sqrt(static_cast<double>(d)) *
                         (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d));

    std::normal_distribution<double> gauss(0.0, 1.0);

    double sigma = sigma0;
    Eigen::MatrixXd C = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd ps = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd pc = Eigen::VectorXd::Zero(d);

    std::vector<Eigen::VectorXd> xs(lambda), ys(lambda);
    std::vector<double> fs(lambda);
    std::vector<int> order(lambda);

    for (int gen = 0; gen < max_gens; ++gen) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(C);
        if (eig.info() != Eigen::Success) break;
        Eigen::VectorXd D = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();
        const Eigen::MatrixXd& B = eig.eigenvectors();
        if (D.maxCoeff() / D.minCoeff() > 1e7) break;

        for (int i = 0; i < lambda; ++i) {
            Eigen::VectorXd z(d);
            for (int j = 0; j < d; ++j) z(j) = gauss(rng);
            const Eigen::VectorXd y = B * (D.asDiagonal() * z);
            xs[i] = clip_unit(mean + sigma * y);
            ys[i] = (xs[i] - mean) / sigma;  // repaired step after clipping
            fs[i] = score(xs[i]);
            tracker.observe(xs[i], fs[i]);
        }

        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return fs[a] > fs[b]; });

        Eigen::VectorXd y_w = Eigen::VectorXd::Zero(d);
        for (int i = 0; i < mu; ++i) y_w += weights(i) * ys[order[i]];
        mean += sigma * y_w;

        const Eigen::MatrixXd inv_sqrt_C =
            B * D.cwiseInverse().asDiagonal() * B.transpose();
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mu_eff) * (inv_sqrt_C * y_w);
        const double ps_norm = ps.norm();
        const bool hs =
            ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (gen + 1))) <
            (1.4 + 2.0 / (d + 1.0)) * chi_n;
        pc = (1.0 - cc) * pc + (hs ? std::sqrt(cc * (2.0 - cc) * mu_eff) : 0.0) * y_w;

        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i < mu; ++i) {
            rank_mu += weights(i) * ys[order[i]] * ys[order[i]].transpose();
        }
        const double delta_hs = (1.0 - (hs ? 1.0 : 0.0)) * cc * (2.0 - cc);
        C = (1.0 - c1 - cmu) * C + c1 * (pc * pc.transpose() + delta_hs * C) +
            cmu * rank_mu;

        sigma *= std::exp((cs / ds) * (ps_norm / chi_n - 1.0));
        if (sigma < 1e-12 || sigma > 1e6) break;
    }
}

}  // namespace

MaximizeResult maximize(const ScoreFn& score, int dimension, const CmaesConfig& config) {
    if (dimension < 1) throw std::invalid_argument("maximize: dimension must be >= 1");
    const int lambda = config.population_size > 0
                           ? std::max(4, config.population_size)
                           : 4 + static_cast<int>(3.0 * std::log(dimension));
    const int max_gens =
        config.max_generations > 0 ? config.max_generations : 100 * dimension;

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Tracker tracker;
    std::vector<std::pair<double, Eigen::VectorXd>> scouted;
    auto scout = [&](Eigen::VectorXd x) {
        const double v = score(x);
        tracker.observe(x, v);
        scouted.emplace_back(v, std::move(x));
    };

    for (int i = 0; i < config.reference_samples; ++i) {
        Eigen::VectorXd x(dimension);
        for (int j = 0; j < dimension; ++j) x(j) = unif(rng);
        scout(std::move(x));
    }
    const double reference_best = tracker.best_value;
    const Eigen::VectorXd reference_argmax = tracker.best_x;

    // Boundary faces often carry the maximum (clipped UCB-style scores);
    // scout each face before choosing warm starts.
    const int per_face = std::max(4, 512 / (2 * dimension));
    for (int j = 0; j < dimension; ++j) {
        for (const double bound : {0.0, 1.0}) {
            for (int k = 0; k < per_face; ++k) {
                Eigen::VectorXd x(dimension);
                for (int q = 0; q < dimension; ++q) x(q) = unif(rng);
                x(j) = bound;
                scout(std::move(x));
            }
        }
    }

    // Warm starts: the best scouted points at least 0.1 apart, refined with
    // a small step size; any remaining restarts search globally.
    std::stable_sort(scouted.begin(), scouted.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    const int restarts = std::max(1, config.restarts);
    std::vector<Eigen::VectorXd> warm_starts;
    const int max_warm = std::min(restarts, 2);
    for (const auto& [v, x] : scouted) {
        bool close = false;
        for (const auto& s : warm_starts) {
            if ((s - x).norm() < 0.1) {
                close = true;
                break;
            }
        }
        if (!close) warm_starts.push_back(x);
        if (static_cast<int>(warm_starts.size()) == max_warm) break;
    }

    for (int r = 0; r < restarts; ++r) {
        if (r < static_cast<int>(warm_starts.size())) {
            run_cma(score, dimension, std::max(lambda, 16), max_gens, 0.06,
                    warm_starts[r], rng, tracker);
        } else {
            Eigen::VectorXd mean(dimension);
            for (int j = 0; j < dimension; ++j) mean(j) = unif(rng);
            run_cma(score, dimension, lambda, max_gens, config.initial_sigma, mean,
                    rng, tracker);
        }
    }

    MaximizeResult result;
    const double span = tracker.max_seen - tracker.min_seen;
    result.flat_landscape =
        span <= 1e-15 * std::max(1.0, std::abs(tracker.max_seen));
    result.all_zero = tracker.max_seen == 0.0 && tracker.min_seen == 0.0;
    if (result.all_zero) {
        result.x = reference_argmax;
        result.value = reference_best;
    } else {
        result.x = tracker.best_x;
        result.value = tracker.best_value;
    }
    return result;
}

}  // namespace asyncbo
