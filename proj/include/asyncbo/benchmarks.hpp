#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "asyncbo/acquisition.hpp"

namespace asyncbo {

// Thrown by an objective when the evaluation fails for an unknown reason
// (the scheduler records the point as infeasible).
class EvaluationFailed : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A minimization test problem on a box domain.
struct BenchmarkProblem {
    std::string name;
    int dimension = 0;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::function<double(const Eigen::VectorXd&)> objective;  // raw coordinates
    std::optional<double> best_value;                         // f* when listed
    std::optional<Eigen::VectorXd> best_point;                // x* when listed
    std::array<int, 3> default_batch{1, 1, 0};                // (acq, explore, classif)
    int max_evaluations = 100;
    std::pair<double, double> duration_range{0.03, 0.9};      // seconds

    Eigen::VectorXd from_unit(const Eigen::VectorXd& u) const {
        return lower.array() + u.array() * (upper - lower).array();
    }
    Eigen::VectorXd to_unit(const Eigen::VectorXd& x) const {
        return (x - lower).array() / (upper - lower).array();
    }
};

// The 16 built-in problems, catalog order: eggholder, camel3, camel6,
// hartmann3, hartmann4, ackley, hartmann6, michalewicz, rosenbrock,
// dixonpr, trid, sumsqu, sumpow, spheref, rothyp, perm0db.
const std::vector<BenchmarkProblem>& builtin_problems();

const BenchmarkProblem& find_problem(const std::string& name);

// Region where the evaluation fails: raw-coordinate ball around `center`.
struct DiskConstraint {
    Eigen::VectorXd center;
    double radius = 0.0;

    bool contains(const Eigen::VectorXd& x) const {
        return (x - center).norm() < radius;
    }
};

// Wraps a problem so that points inside `unknown_disk` throw EvaluationFailed.
// When `known_disk` is given an inequality keeping points outside it is
// attached as a known constraint (evaluated on raw coordinates).
struct ConstrainedProblem {
    BenchmarkProblem base;
    std::optional<DiskConstraint> unknown_disk;
    std::optional<DiskConstraint> known_disk;
};

ConstrainedProblem add_synthetic_constrained(
    const BenchmarkProblem& problem, const DiskConstraint& unknown_disk,
    std::optional<DiskConstraint> known_disk = std::nullopt);

// What the scheduler sees: a maximization objective over the unit cube with
// known constraints in unit coordinates. Evaluation may throw
// EvaluationFailed (unknown-infeasible).
struct EngineProblem {
    int dimension = 0;
    std::function<double(const Eigen::VectorXd&)> evaluate;  // unit cube, maximize
    KnownConstraintSet known;
    std::pair<double, double> duration_range{0.03, 0.9};
    bool negated = true;  // true when the raw problem minimizes
};

EngineProblem make_engine_problem(const BenchmarkProblem& problem);
EngineProblem make_engine_problem(const ConstrainedProblem& problem);

}  // namespace asyncbo
