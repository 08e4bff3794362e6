#include <doctest.h>

#include <cmath>
#include <random>

#include "asyncbo/feasibility.hpp"

using namespace asyncbo;

namespace {

FeasibilityModel fit_grid(const std::vector<std::pair<double, double>>& pts,
                          const std::vector<bool>& labels) {
    Eigen::MatrixXd X(pts.size(), 2);
    for (size_t i = 0; i < pts.size(); ++i) {
        X(static_cast<Eigen::Index>(i), 0) = pts[i].first;
        X(static_cast<Eigen::Index>(i), 1) = pts[i].second;
    }
    return FeasibilityModel::fit(X, labels, 0.1, std::nullopt, 3);
}

}  // namespace

TEST_CASE("all-feasible training keeps probabilities at or above one half") {
    const auto model = fit_grid({{0.1, 0.1}, {0.5, 0.5}, {0.9, 0.9}, {0.2, 0.8}},
                                {true, true, true, true});
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd x(2);
        x << unif(rng), unif(rng);
        CHECK(model.prob_feasible(x) >= 0.5);
    }
    Eigen::VectorXd at(2);
    at << 0.5, 0.5;
    CHECK(model.prob_feasible(at) >= 0.8);
}

TEST_CASE("probabilities are complementary and inside [0, 1]") {
    const auto model = fit_grid({{0.1, 0.1}, {0.9, 0.9}, {0.1, 0.9}, {0.9, 0.1}},
                                {true, false, true, false});
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        Eigen::VectorXd x(2);
        x << unif(rng), unif(rng);
        const double p = model.prob_feasible(x);
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        // Pr(=0) is 1 - Pr(=1) by construction of the probit link.
        CHECK((1.0 - p) + p == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("latent mean sign matches the training labels") {
    const std::vector<std::pair<double, double>> pts{
        {0.1, 0.1}, {0.2, 0.3}, {0.8, 0.8}, {0.9, 0.7}, {0.85, 0.9}};
    const std::vector<bool> labels{true, true, false, false, false};
    const auto model = fit_grid(pts, labels);
    for (size_t i = 0; i < pts.size(); ++i) {
        Eigen::VectorXd x(2);
        x << pts[i].first, pts[i].second;
        const double latent = model.latent().predict(x).first;
        CHECK((latent > 0) == labels[i]);
    }
}

TEST_CASE("infeasible training points push probability down") {
    const auto model = fit_grid({{0.2, 0.2}, {0.3, 0.2}, {0.2, 0.3}, {0.8, 0.8},
                                 {0.7, 0.8}, {0.8, 0.7}},
                                {true, true, true, false, false, false});
    Eigen::VectorXd bad(2), good(2);
    bad << 0.8, 0.8;
    good << 0.2, 0.2;
    CHECK(model.prob_feasible(bad) <= 0.2);
    CHECK(model.prob_feasible(good) >= 0.8);
}

TEST_CASE("classification variance grows away from the data") {
    const auto model = fit_grid({{0.4, 0.4}, {0.5, 0.5}, {0.6, 0.6}, {0.45, 0.55}},
                                {true, true, false, true});
    Eigen::VectorXd near(2), far(2);
    near << 0.5, 0.5;
    far << 0.0, 1.0;
    CHECK(model.classification_variance(near) < model.classification_variance(far));
    CHECK(model.classification_variance(near) >= 0.0);
}

TEST_CASE("at least one labeled point required") {
    Eigen::MatrixXd X(0, 2);
    CHECK_THROWS_AS(FeasibilityModel::fit(X, {}, 0.1), std::invalid_argument);
}
