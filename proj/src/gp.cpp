#include "asyncbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace asyncbo {
namespace {

constexpr double kBaseJitterFactor = 1e-10;
constexpr double kMaxJitterFactor = 1e-4;

// Latin hypercube in [0,1]^k.
Eigen::MatrixXd latin_hypercube(int n, int k, std::mt19937_64& rng) {
    Eigen::MatrixXd pts(n, k);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> perm(n);
    for (int j = 0; j < k; ++j) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < n; ++i) {
            pts(i, j) = (perm[i] + unif(rng)) / n;
        }
    }
    return pts;
}

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::infinity();
};

// Minimizes fn over a box, clamping every trial point into bounds.
// Tracks the best point ever evaluated, so the result never regresses
// below the start.
template <typename Fn>
NelderMeadResult nelder_mead(Fn&& fn, const Eigen::VectorXd& start,
                             const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                             int max_evals) {
    const int k = static_cast<int>(start.size());
    auto clamp = [&](Eigen::VectorXd p) {
        for (int i = 0; i < k; ++i) p(i) = std::clamp(p(i), lo(i), hi(i));
        return p;
    };

    NelderMeadResult best;
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& p) {
        ++evals;
        const double v = fn(p);
        if (v < best.value) {
            best.value = v;
            best.x = p;
        }
        return v;
    };

    std::vector<Eigen::VectorXd> simplex;
    std::vector<double> values;
    simplex.push_back(clamp(start));
    values.push_back(eval(simplex[0]));
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd p = simplex[0];
        const double step = 0.25 * (hi(i) - lo(i));
        p(i) = (p(i) + step <= hi(i)) ? p(i) + step : p(i) - step;
        simplex.push_back(clamp(p));
        values.push_back(eval(simplex.back()));
    }

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    while (evals < max_evals) {
        std::vector<int> order(simplex.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return values[a] < values[b]; });
        std::vector<Eigen::VectorXd> s2;
        std::vector<double> v2;
        for (int idx : order) {
            s2.push_back(simplex[idx]);
            v2.push_back(values[idx]);
        }
        simplex.swap(s2);
        values.swap(v2);

        if (std::abs(values.back() - values.front()) <
            1e-12 * (1.0 + std::abs(values.front()))) {
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(k);
        for (int i = 0; i < k; ++i) centroid += simplex[i];
        centroid /= static_cast<double>(k);

        const Eigen::VectorXd reflected = clamp(centroid + alpha * (centroid - simplex.back()));
        const double fr = eval(reflected);
        if (fr < values.front()) {
            const Eigen::VectorXd expanded = clamp(centroid + gamma * (reflected - centroid));
            const double fe = eval(expanded);
            simplex.back() = (fe < fr) ? expanded : reflected;
            values.back() = std::min(fe, fr);
        } else if (fr < values[values.size() - 2]) {
            simplex.back() = reflected;
            values.back() = fr;
        } else {
            const Eigen::VectorXd contracted =
                clamp(centroid + rho * (simplex.back() - centroid));
            const double fc = eval(contracted);
            if (fc < values.back()) {
                simplex.back() = contracted;
                values.back() = fc;
            } else {
                for (size_t i = 1; i < simplex.size(); ++i) {
                    simplex[i] = clamp(simplex[0] + sigma * (simplex[i] - simplex[0]));
                    values[i] = eval(simplex[i]);
                    if (evals >= max_evals) break;
                }
            }
        }
    }
    return best;
}

}  // namespace

void merge_duplicate_rows(Eigen::MatrixXd& X, Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows();
    std::vector<Eigen::Index> keep;
    keep.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        bool duplicate = false;
        for (Eigen::Index& k : keep) {
            if ((X.row(i) - X.row(k)).norm() < kDuplicateTolerance) {
                k = i;  // later row wins
                duplicate = true;
                break;
            }
        }
        if (!duplicate) keep.push_back(i);
    }
    if (static_cast<Eigen::Index>(keep.size()) == n) return;
    Eigen::MatrixXd Xm(keep.size(), X.cols());
    Eigen::VectorXd ym(keep.size());
    for (size_t i = 0; i < keep.size(); ++i) {
        Xm.row(static_cast<Eigen::Index>(i)) = X.row(keep[i]);
        ym(static_cast<Eigen::Index>(i)) = y(keep[i]);
    }
    X = std::move(Xm);
    y = std::move(ym);
}

GpModel GpModel::fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                     const KernelSpec& spec, double noise_variance,
                     std::optional<double> prior_mean) {
    if (inputs.rows() < 1) {
        throw std::invalid_argument("gp_fit: need at least one observation");
    }
    if (inputs.rows() != outputs.size()) {
        throw std::invalid_argument("gp_fit: inputs/outputs size mismatch");
    }
    if (inputs.cols() != spec.length_scales.size()) {
        throw std::invalid_argument("gp_fit: kernel dimension mismatch");
    }
    if (noise_variance < 0.0) {
        throw std::invalid_argument("gp_fit: noise_variance must be nonnegative");
    }
    spec.validate();

    GpModel m;
    m.inputs_ = inputs;
    m.outputs_ = outputs;
    merge_duplicate_rows(m.inputs_, m.outputs_);
    m.kernel_ = spec;
    m.noise_variance_ = noise_variance;
    m.prior_mean_ = prior_mean.value_or(m.outputs_.mean());

    const Eigen::Index n = m.inputs_.rows();
    const Eigen::MatrixXd K = kernel_matrix(m.inputs_, spec);
    double jitter = kBaseJitterFactor * spec.signal_variance;
    const double max_jitter = kMaxJitterFactor * spec.signal_variance;
    while (true) {
        Eigen::MatrixXd A = K;
        A.diagonal().array() += noise_variance + jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() == Eigen::Success) {
            m.jitter_ = jitter;
            m.chol_ = llt.matrixL();
            const Eigen::VectorXd centered =
                m.outputs_ - Eigen::VectorXd::Constant(n, m.prior_mean_);
            m.alpha_ = llt.solve(centered);
            return m;
        }
        if (jitter >= max_jitter) {
            throw NumericalError("gp_fit: Cholesky failed at maximum jitter", jitter);
        }
        jitter *= 10.0;
    }
}

std::pair<double, double> GpModel::predict(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd k = kernel_vector(inputs_, x, kernel_);
    const double mean = prior_mean_ + k.dot(alpha_);
    const Eigen::VectorXd v =
        chol_.triangularView<Eigen::Lower>().solve(k);
    double variance = kernel_.signal_variance - v.squaredNorm();
    variance = std::max(0.0, variance);
    return {mean, variance};
}

double GpModel::log_marginal_likelihood() const {
    const Eigen::Index n = inputs_.rows();
    const Eigen::VectorXd centered =
        outputs_ - Eigen::VectorXd::Constant(n, prior_mean_);
    const double quad = centered.dot(alpha_);
    const double logdet = chol_.diagonal().array().log().sum();
    return -0.5 * quad - logdet - 0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
}

HyperBounds default_hyper_bounds(const Eigen::VectorXd& outputs) {
    HyperBounds b;
    const double mean = outputs.mean();
    double var = (outputs.array() - mean).square().mean();
    if (!(var > 1e-12)) var = 1.0;
    b.signal_lo = 1e-3 * var;
    b.signal_hi = 1e3 * var;
    return b;
}

KernelSpec fit_hyperparameters(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs,
                               KernelFamily family, const HyperBounds& bounds,
                               double noise_variance, int n_starts, std::uint64_t seed) {
    const int d = static_cast<int>(inputs.cols());
    const int k = d + 1;  // log signal variance + d log length scales

    Eigen::VectorXd lo(k), hi(k);
    lo(0) = std::log(bounds.signal_lo);
    hi(0) = std::log(bounds.signal_hi);
    for (int i = 0; i < d; ++i) {
        lo(i + 1) = std::log(bounds.scale_lo);
        hi(i + 1) = std::log(bounds.scale_hi);
    }

    auto make_spec = [&](const Eigen::VectorXd& p) {
        KernelSpec s;
        s.family = family;
        s.signal_variance = std::exp(p(0));
        s.length_scales = p.tail(d).array().exp();
        return s;
    };
    auto neg_lml = [&](const Eigen::VectorXd& p) {
        try {
            return -GpModel::fit(inputs, outputs, make_spec(p), noise_variance)
                        .log_marginal_likelihood();
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    const Eigen::MatrixXd lhs = latin_hypercube(n_starts, k, rng);

    NelderMeadResult best;
    const int evals_per_start = 60 * k + 40;
    for (int s = 0; s < n_starts; ++s) {
        Eigen::VectorXd start =
            lo.array() + lhs.row(s).transpose().array() * (hi - lo).array();
        const NelderMeadResult r = nelder_mead(neg_lml, start, lo, hi, evals_per_start);
        if (r.value < best.value) best = r;
    }
    if (!std::isfinite(best.value)) {
        throw NumericalError("fit_hyperparameters: every start failed to factorize",
                             kMaxJitterFactor);
    }
    return make_spec(best.x);
}

}  // namespace asyncbo
