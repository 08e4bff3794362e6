#include <doctest.h>

#include <cmath>
#include <random>

#include "asyncbo/gp.hpp"
#include "reference_oracles.hpp"

using namespace asyncbo;

namespace {

KernelSpec unit_spec(int d, KernelFamily family = KernelFamily::Matern52,
                     double s2 = 1.0, double ls = 0.5) {
    KernelSpec spec;
    spec.family = family;
    spec.signal_variance = s2;
    spec.length_scales = Eigen::VectorXd::Constant(d, ls);
    return spec;
}

struct RandomProblem {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    KernelSpec spec;
    double noise;
};

RandomProblem random_problem(std::mt19937_64& rng, int max_n = 20, int max_d = 5) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RandomProblem p;
    const int n = 2 + static_cast<int>(unif(rng) * (max_n - 2));
    const int d = 1 + static_cast<int>(unif(rng) * (max_d - 1));
    p.X = Eigen::MatrixXd(n, d);
    p.y = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) p.X(i, j) = unif(rng);
        p.y(i) = gauss(rng);
    }
    p.spec = unit_spec(d, static_cast<KernelFamily>(rng() % 4), 0.5 + unif(rng),
                       0.2 + unif(rng));
    p.noise = 0.01 + 0.2 * unif(rng);
    return p;
}

}  // namespace

TEST_CASE("noise-free model interpolates the training data") {
    Eigen::MatrixXd X(3, 1);
    X << 0.1, 0.5, 0.9;
    Eigen::VectorXd y(3);
    y << -1.0, 0.4, 2.0;
    const GpModel model = GpModel::fit(X, y, unit_spec(1), 0.0);
    for (int i = 0; i < 3; ++i) {
        const auto [mean, var] = model.predict(X.row(i));
        CHECK(std::abs(mean - y(i)) <= 1e-6);
        CHECK(var <= 1e-6);
        CHECK(var >= 0.0);
    }
}

TEST_CASE("prediction far from data recovers the prior") {
    Eigen::MatrixXd X(4, 2);
    X << 0.1, 0.1, 0.2, 0.3, 0.3, 0.2, 0.15, 0.25;
    Eigen::VectorXd y(4);
    y << 1.0, 2.0, 3.0, 2.5;
    auto spec = unit_spec(2, KernelFamily::Matern52, 2.0, 0.05);
    const GpModel model = GpModel::fit(X, y, spec, 0.0);
    Eigen::VectorXd far(2);
    far << 50.0, 50.0;
    const auto [mean, var] = model.predict(far);
    CHECK(mean == doctest::Approx(model.prior_mean()).epsilon(1e-3));
    CHECK(var == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("factor reconstructs the regularized gram matrix") {
    std::mt19937_64 rng(3);
    const RandomProblem p = random_problem(rng);
    const GpModel model = GpModel::fit(p.X, p.y, p.spec, p.noise);
    const Eigen::MatrixXd L = model.cholesky_factor();
    Eigen::MatrixXd K = kernel_matrix(model.inputs(), p.spec);
    K.diagonal().array() += p.noise + model.jitter();
    const double rel = (L * L.transpose() - K).norm() / K.norm();
    CHECK(rel <= 1e-8);
}

TEST_CASE("posterior matches the dense-inverse oracle") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const RandomProblem p = random_problem(rng);
        const GpModel model = GpModel::fit(p.X, p.y, p.spec, p.noise);
        Eigen::VectorXd q(p.X.cols());
        for (int j = 0; j < q.size(); ++j) q(j) = unif(rng);
        const auto [mean, var] = model.predict(q);
        const auto ref = reference::dense_gp_predict(
            p.X, p.y, p.spec, p.noise, model.jitter(), model.prior_mean(), q);
        CHECK(mean == doctest::Approx(ref.mean).epsilon(1e-8));
        CHECK(var == doctest::Approx(std::max(0.0, ref.variance)).epsilon(1e-8));
        CHECK(var >= 0.0);
    }
}

TEST_CASE("log marginal likelihood closed form, n = 1") {
    // With y = m and unit variance the quadratic term vanishes and
    // lml = -log(2 pi) / 2.
    Eigen::MatrixXd X(1, 1);
    X << 0.5;
    Eigen::VectorXd y(1);
    y << 3.0;
    auto spec = unit_spec(1, KernelFamily::SquaredExponential, 1.0, 1.0);
    const GpModel model = GpModel::fit(X, y, spec, 0.0, 3.0);
    CHECK(model.log_marginal_likelihood() ==
          doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-9));
}

TEST_CASE("log marginal likelihood matches the dense oracle") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 25; ++trial) {
        const RandomProblem p = random_problem(rng);
        const GpModel model = GpModel::fit(p.X, p.y, p.spec, p.noise);
        const double ref = reference::dense_log_marginal_likelihood(
            p.X, p.y, p.spec, p.noise, model.jitter(), model.prior_mean());
        CHECK(model.log_marginal_likelihood() == doctest::Approx(ref).epsilon(1e-8));
    }
}

TEST_CASE("constant outputs zero out the quadratic term") {
    Eigen::MatrixXd X(3, 1);
    X << 0.1, 0.5, 0.9;
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(3, 4.2);
    const GpModel model = GpModel::fit(X, y, unit_spec(1), 0.1);
    // lml reduces to -sum log L_ii - (n/2) log 2pi exactly.
    const double logdet = model.cholesky_factor().diagonal().array().log().sum();
    CHECK(model.log_marginal_likelihood() ==
          doctest::Approx(-logdet - 1.5 * std::log(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("duplicate inputs are merged keeping the latest output") {
    Eigen::MatrixXd X(3, 1);
    X << 0.5, 0.2, 0.5;
    Eigen::VectorXd y(3);
    y << 1.0, 7.0, 2.0;
    const GpModel model = GpModel::fit(X, y, unit_spec(1), 0.0);
    CHECK(model.size() == 2);
    Eigen::VectorXd q(1);
    q << 0.5;
    CHECK(model.predict(q).first == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("near-duplicate rows do not break the factorization") {
    Eigen::MatrixXd X(4, 2);
    X << 0.5, 0.5, 0.5 + 1e-13, 0.5, 0.1, 0.9, 0.9, 0.1;
    Eigen::VectorXd y(4);
    y << 1.0, 1.5, 0.0, 2.0;
    const GpModel model = GpModel::fit(X, y, unit_spec(2), 0.0);
    CHECK(model.size() == 3);
}

TEST_CASE("empty training set is rejected") {
    Eigen::MatrixXd X(0, 2);
    Eigen::VectorXd y(0);
    CHECK_THROWS_AS(GpModel::fit(X, y, unit_spec(2), 0.0), std::invalid_argument);
}

TEST_CASE("hyperparameter fit improves on every start point") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd X(14, 2);
    Eigen::VectorXd y(14);
    for (int i = 0; i < 14; ++i) {
        X(i, 0) = unif(rng);
        X(i, 1) = unif(rng);
        y(i) = std::sin(6.0 * X(i, 0)) + 0.5 * std::cos(4.0 * X(i, 1));
    }
    const HyperBounds bounds = default_hyper_bounds(y);
    const KernelSpec best =
        fit_hyperparameters(X, y, KernelFamily::Matern52, bounds, 1e-6, 8, 5);
    const double best_lml =
        GpModel::fit(X, y, best, 1e-6).log_marginal_likelihood();

    // A handful of fixed probes inside the bounds must not beat the result.
    for (double s2 : {bounds.signal_lo, 1.0, bounds.signal_hi}) {
        for (double ls : {0.01, 0.3, 1.0, 10.0}) {
            KernelSpec probe;
            probe.family = KernelFamily::Matern52;
            probe.signal_variance = s2;
            probe.length_scales = Eigen::VectorXd::Constant(2, ls);
            const double lml =
                GpModel::fit(X, y, probe, 1e-6).log_marginal_likelihood();
            CHECK(best_lml >= lml - 1e-6);
        }
    }
}
