#include "asyncbo/benchmarks.hpp"

#include <cmath>
#include <limits>

namespace asyncbo {
namespace {

using Vec = Eigen::VectorXd;

Vec constant_vec(int d, double v) { return Vec::Constant(d, v); }

double eggholder(const Vec& x) {
    const double a = x(1) + 0.5 * x(0) + 47.0;
    const double b = x(0) - (x(1) + 47.0);
    return -(x(1) + 47.0) * std::sin(std::sqrt(std::abs(a))) -
           x(0) * std::sin(std::sqrt(std::abs(b)));
}

double camel3(const Vec& x) {
    const double x1 = x(0), x2 = x(1);
    return 2.0 * x1 * x1 - 1.05 * std::pow(x1, 4) + std::pow(x1, 6) / 6.0 + x1 * x2 +
           x2 * x2;
}

double camel6(const Vec& x) {
    const double x1 = x(0), x2 = x(1);
    return (4.0 - 2.1 * x1 * x1 + std::pow(x1, 4) / 3.0) * x1 * x1 + x1 * x2 +
           (-4.0 + 4.0 * x2 * x2) * x2 * x2;
}

// Hartmann family coefficients.
const double kHart3A[4][3] = {
    {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}, {3.0, 10.0, 30.0}, {0.1, 10.0, 35.0}};
const double kHart3P[4][3] = {{0.3689, 0.1170, 0.2673},
                              {0.4699, 0.4387, 0.7470},
                              {0.1091, 0.8732, 0.5547},
                              {0.0381, 0.5743, 0.8828}};
const double kHart6A[4][6] = {{10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
                              {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
                              {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
                              {17.0, 8.0, 0.05, 10.0, 0.1, 14.0}};
const double kHart6P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                              {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                              {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                              {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
const double kHartAlpha[4] = {1.0, 1.2, 3.0, 3.2};

double hartmann3(const Vec& x) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        double inner = 0.0;
        for (int j = 0; j < 3; ++j) {
            const double dj = x(j) - kHart3P[i][j];
            inner += kHart3A[i][j] * dj * dj;
        }
        sum += kHartAlpha[i] * std::exp(-inner);
    }
    return -sum;
}

// 4-d Hartmann uses the first four columns of the 6-d coefficients.
double hartmann4(const Vec& x) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        double inner = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double dj = x(j) - kHart6P[i][j];
            inner += kHart6A[i][j] * dj * dj;
        }
        sum += kHartAlpha[i] * std::exp(-inner);
    }
    return (1.1 - sum) / 0.839;
}

double hartmann6(const Vec& x) {
    double sum = 0.0;
    for (int i = 0; i < 4; ++i) {
        double inner = 0.0;
        for (int j = 0; j < 6; ++j) {
            const double dj = x(j) - kHart6P[i][j];
            inner += kHart6A[i][j] * dj * dj;
        }
        sum += kHartAlpha[i] * std::exp(-inner);
    }
    return -sum;
}

double ackley(const Vec& x) {
    const double a = 20.0, b = 0.2, c = 2.0 * M_PI;
    const int d = static_cast<int>(x.size());
    double sq = 0.0, cs = 0.0;
    for (int i = 0; i < d; ++i) {
        sq += x(i) * x(i);
        cs += std::cos(c * x(i));
    }
    return -a * std::exp(-b * std::sqrt(sq / d)) - std::exp(cs / d) + a + std::exp(1.0);
}

double michalewicz(const Vec& x) {
    constexpr int m = 10;
    double sum = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double s = std::sin((i + 1) * x(i) * x(i) / M_PI);
        sum += std::sin(x(i)) * std::pow(s * s, m);
    }
    return -sum;
}

double rosenbrock(const Vec& x) {
    double sum = 0.0;
    for (int i = 0; i + 1 < x.size(); ++i) {
        const double t = x(i + 1) - x(i) * x(i);
        sum += 100.0 * t * t + (x(i) - 1.0) * (x(i) - 1.0);
    }
    return sum;
}

double dixonpr(const Vec& x) {
    double sum = (x(0) - 1.0) * (x(0) - 1.0);
    for (int i = 1; i < x.size(); ++i) {
        const double t = 2.0 * x(i) * x(i) - x(i - 1);
        sum += (i + 1) * t * t;
    }
    return sum;
}

double trid(const Vec& x) {
    double sq = 0.0, prod = 0.0;
    for (int i = 0; i < x.size(); ++i) sq += (x(i) - 1.0) * (x(i) - 1.0);
    for (int i = 1; i < x.size(); ++i) prod += x(i) * x(i - 1);
    return sq - prod;
}

double sumsqu(const Vec& x) {
    double sum = 0.0;
    for (int i = 0; i < x.size(); ++i) sum += (i + 1) * x(i) * x(i);
    return sum;
}

double sumpow(const Vec& x) {
    double sum = 0.0;
    for (int i = 0; i < x.size(); ++i) sum += std::pow(std::abs(x(i)), i + 2);
    return sum;
}

double spheref(const Vec& x) { return x.squaredNorm(); }

double rothyp(const Vec& x) {
    double sum = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        sum += (x.size() - i) * x(i) * x(i);  // x_j^2 appears in d-j+1 outer terms
    }
    return sum;
}

long double ipow(long double base, int exponent) {
    long double r = 1.0L;
    for (int i = 0; i < exponent; ++i) r *= base;
    return r;
}

// Accumulated in long double: inner terms reach ~1e154 at d = 80 and the
// squared outer sum can exceed double range, so the result saturates at
// the largest finite double.
double perm0db(const Vec& x) {
    constexpr long double beta = 0.5L;
    const int d = static_cast<int>(x.size());
    long double outer = 0.0L;
    for (int i = 1; i <= d; ++i) {
        long double inner = 0.0L;
        for (int j = 1; j <= d; ++j) {
            inner += (j + beta) * (ipow(x(j - 1), i) - ipow(1.0L / j, i));
        }
        outer += inner * inner;
    }
    constexpr long double cap = std::numeric_limits<double>::max();
    return static_cast<double>(std::min(outer, cap));
}

std::vector<BenchmarkProblem> make_catalog() {
    std::vector<BenchmarkProblem> v;
    auto add = [&](BenchmarkProblem p) { v.push_back(std::move(p)); };

    {
        BenchmarkProblem p;
        p.name = "eggholder";
        p.dimension = 2;
        p.lower = constant_vec(2, -512.0);
        p.upper = constant_vec(2, 512.0);
        p.objective = eggholder;
        p.best_value = -959.6407;
        p.best_point = (Vec(2) << 512.0, 404.2319).finished();
        p.default_batch = {2, 2, 0};
        p.max_evaluations = 80;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "camel3";
        p.dimension = 2;
        p.lower = constant_vec(2, -5.0);
        p.upper = constant_vec(2, 5.0);
        p.objective = camel3;
        p.best_value = 0.0;
        p.best_point = constant_vec(2, 0.0);
        p.default_batch = {2, 2, 0};
        p.max_evaluations = 80;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "camel6";
        p.dimension = 2;
        p.lower = (Vec(2) << -3.0, -2.0).finished();
        p.upper = (Vec(2) << 3.0, 2.0).finished();
        p.objective = camel6;
        p.best_value = -1.0316;
        p.best_point = (Vec(2) << -0.0898, 0.7126).finished();
        p.default_batch = {3, 1, 0};
        p.max_evaluations = 80;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "hartmann3";
        p.dimension = 3;
        p.lower = constant_vec(3, 0.0);
        p.upper = constant_vec(3, 1.0);
        p.objective = hartmann3;
        p.best_value = -3.86278;
        p.best_point = (Vec(3) << 0.114614, 0.555649, 0.852547).finished();
        p.default_batch = {3, 3, 0};
        p.max_evaluations = 150;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "hartmann4";
        p.dimension = 4;
        p.lower = constant_vec(4, 0.0);
        p.upper = constant_vec(4, 1.0);
        p.objective = hartmann4;
        p.default_batch = {4, 4, 0};
        p.max_evaluations = 160;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "ackley";
        p.dimension = 5;
        p.lower = constant_vec(5, -32.768);
        p.upper = constant_vec(5, 32.768);
        p.objective = ackley;
        p.best_value = 0.0;
        p.best_point = constant_vec(5, 0.0);
        p.default_batch = {6, 4, 0};
        p.max_evaluations = 200;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "hartmann6";
        p.dimension = 6;
        p.lower = constant_vec(6, 0.0);
        p.upper = constant_vec(6, 1.0);
        p.objective = hartmann6;
        p.best_value = -3.32237;
        p.best_point =
            (Vec(6) << 0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573)
                .finished();
        p.default_batch = {5, 5, 0};
        p.max_evaluations = 300;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "michalewicz";
        p.dimension = 10;
        p.lower = constant_vec(10, 0.0);
        p.upper = constant_vec(10, M_PI);
        p.objective = michalewicz;
        p.default_batch = {5, 5, 0};
        p.max_evaluations = 400;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "rosenbrock";
        p.dimension = 20;
        p.lower = constant_vec(20, -5.0);
        p.upper = constant_vec(20, 10.0);
        p.objective = rosenbrock;
        p.best_value = 0.0;
        p.best_point = constant_vec(20, 1.0);
        p.default_batch = {6, 4, 0};
        p.max_evaluations = 400;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "dixonpr";
        p.dimension = 25;
        p.lower = constant_vec(25, -10.0);
        p.upper = constant_vec(25, 10.0);
        p.objective = dixonpr;
        p.best_value = 0.0;
        Vec xstar(25);
        for (int i = 1; i <= 25; ++i) {
            const double e = std::pow(2.0, i);
            xstar(i - 1) = std::pow(2.0, -(e - 2.0) / e);
        }
        p.best_point = xstar;
        p.default_batch = {7, 7, 0};
        p.max_evaluations = 480;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "trid";
        p.dimension = 30;
        p.lower = constant_vec(30, -900.0);
        p.upper = constant_vec(30, 900.0);
        p.objective = trid;
        p.best_value = -30.0 * 34.0 * 29.0 / 6.0;
        Vec xstar(30);
        for (int i = 1; i <= 30; ++i) xstar(i - 1) = i * (31.0 - i);
        p.best_point = xstar;
        p.default_batch = {6, 4, 0};
        p.max_evaluations = 400;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "sumsqu";
        p.dimension = 40;
        p.lower = constant_vec(40, -5.12);
        p.upper = constant_vec(40, 5.12);
        p.objective = sumsqu;
        p.best_value = 0.0;
        p.best_point = constant_vec(40, 0.0);
        p.default_batch = {6, 4, 0};
        p.max_evaluations = 400;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "sumpow";
        p.dimension = 50;
        p.lower = constant_vec(50, -1.0);
        p.upper = constant_vec(50, 1.0);
        p.objective = sumpow;
        p.best_value = 0.0;
        p.best_point = constant_vec(50, 0.0);
        p.default_batch = {6, 4, 0};
        p.max_evaluations = 400;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "spheref";
        p.dimension = 60;
        p.lower = constant_vec(60, -5.12);
        p.upper = constant_vec(60, 5.12);
        p.objective = spheref;
        p.best_value = 0.0;
        p.best_point = constant_vec(60, 0.0);
        p.default_batch = {6, 4, 0};
        p.max_evaluations = 400;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "rothyp";
        p.dimension = 70;
        p.lower = constant_vec(70, -65.536);
        p.upper = constant_vec(70, 65.536);
        p.objective = rothyp;
        p.best_value = 0.0;
        p.best_point = constant_vec(70, 0.0);
        p.default_batch = {6, 4, 0};
        p.max_evaluations = 400;
        add(p);
    }
    {
        BenchmarkProblem p;
        p.name = "perm0db";
        p.dimension = 80;
        p.lower = constant_vec(80, -80.0);
        p.upper = constant_vec(80, 80.0);
        p.objective = perm0db;
        p.best_value = 0.0;
        Vec xstar(80);
        for (int i = 1; i <= 80; ++i) xstar(i - 1) = 1.0 / i;
        p.best_point = xstar;
        p.default_batch = {6, 4, 0};
        p.max_evaluations = 400;
        add(p);
    }
    return v;
}

}  // namespace

const std::vector<BenchmarkProblem>& builtin_problems() {
    static const std::vector<BenchmarkProblem> catalog = make_catalog();
    return catalog;
}

const BenchmarkProblem& find_problem(const std::string& name) {
    for (const auto& p : builtin_problems()) {
        if (p.name == name) return p;
    }
    throw std::invalid_argument("unknown benchmark problem: " + name);
}

ConstrainedProblem add_synthetic_constrained(const BenchmarkProblem& problem,
                                             const DiskConstraint& unknown_disk,
                                             std::optional<DiskConstraint> known_disk) {
    return ConstrainedProblem{problem, unknown_disk, std::move(known_disk)};
}

EngineProblem make_engine_problem(const BenchmarkProblem& problem) {
    EngineProblem ep;
    ep.dimension = problem.dimension;
    ep.duration_range = problem.duration_range;
    ep.evaluate = [problem](const Eigen::VectorXd& u) {
        return -problem.objective(problem.from_unit(u));
    };
    return ep;
}

EngineProblem make_engine_problem(const ConstrainedProblem& problem) {
    EngineProblem ep;
    ep.dimension = problem.base.dimension;
    ep.duration_range = problem.base.duration_range;
    const BenchmarkProblem base = problem.base;
    DiskConstraint unknown{Eigen::VectorXd::Zero(base.dimension), -1.0};
    if (problem.unknown_disk) unknown = *problem.unknown_disk;
    ep.evaluate = [base, unknown](const Eigen::VectorXd& u) {
        const Eigen::VectorXd x = base.from_unit(u);
        if (unknown.radius > 0.0 && unknown.contains(x)) {
            throw EvaluationFailed("synthetic unknown-infeasible region");
        }
        return -base.objective(x);
    };
    if (problem.known_disk) {
        const DiskConstraint disk = *problem.known_disk;
        KnownConstraint c;
        // radius - ||x - c|| <= 0 keeps points outside the disk.
        c.fn = [base, disk](const Eigen::VectorXd& u) {
            return disk.radius - (base.from_unit(u) - disk.center).norm();
        };
        c.threshold = 0.0;
        ep.known.constraints.push_back(std::move(c));
    }
    return ep;
}

}  // namespace asyncbo
