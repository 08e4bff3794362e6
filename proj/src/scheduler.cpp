#include "asyncbo/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <random>
#include <thread>

namespace asyncbo {

using nlohmann::json;

std::string to_string(BatchKind batch) {
    switch (batch) {
        case BatchKind::Acquisition: return "acquisition";
        case BatchKind::Explore: return "explore";
        case BatchKind::ExploreClassif: return "explore_classif";
        case BatchKind::Initial: return "initial";
    }
    return "unknown";
}

std::string SchedulerMode::name() const {
    switch (kind) {
        case ModeKind::AsyncHedge: return "async_hedge";
        case ModeKind::AsyncSingle: return "async_" + to_string(acquisition);
        case ModeKind::SyncBatch: return "sync_" + to_string(acquisition);
        case ModeKind::RandomSearch: return "random";
    }
    return "unknown";
}

SchedulerMode SchedulerMode::parse(const std::string& name) {
    SchedulerMode m;
    if (name == "async_hedge") {
        m.kind = ModeKind::AsyncHedge;
    } else if (name == "random") {
        m.kind = ModeKind::RandomSearch;
    } else if (name.rfind("async_", 0) == 0) {
        m.kind = ModeKind::AsyncSingle;
        m.acquisition = acquisition_from_string(name.substr(6));
    } else if (name.rfind("sync_", 0) == 0) {
        m.kind = ModeKind::SyncBatch;
        m.acquisition = acquisition_from_string(name.substr(5));
    } else {
        throw std::invalid_argument("unknown scheduler mode: " + name);
    }
    return m;
}

std::optional<BatchKind> select_batch(const std::array<int, 3>& in_flight,
                                      const BatchConfig& config,
                                      bool classifier_active) {
    if (in_flight[0] < config.acq_size) return BatchKind::Acquisition;
    if (in_flight[1] < config.explore_size) return BatchKind::Explore;
    if (classifier_active && in_flight[2] < config.classif_size) {
        return BatchKind::ExploreClassif;
    }
    return std::nullopt;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> hallucinate(
    const std::vector<EvaluationRecord>& records, const GpModel& objective_gp) {
    const Eigen::Index d = objective_gp.dimension();
    Eigen::MatrixXd X(records.size(), d);
    Eigen::VectorXd y(records.size());
    Eigen::Index row = 0;
    for (const auto& rec : records) {
        X.row(row) = rec.x;
        if (rec.status == EvalStatus::CompleteFeasible) {
            y(row) = *rec.y;
        } else {
            y(row) = objective_gp.predict(rec.x).first;
        }
        ++row;
    }
    return {std::move(X), std::move(y)};
}

GpModel interpolate_objective_gp(const std::vector<EvaluationRecord>& records,
                                 const KernelSpec& spec, double noise_variance) {
    std::vector<const EvaluationRecord*> feasible, infeasible;
    for (const auto& rec : records) {
        if (rec.status == EvalStatus::CompleteFeasible) feasible.push_back(&rec);
        if (rec.status == EvalStatus::CompleteInfeasible) infeasible.push_back(&rec);
    }
    if (feasible.empty()) {
        throw NoFeasibleData("interpolate_objective_gp: no feasible data");
    }
    const int d = static_cast<int>(feasible.front()->x.size());
    Eigen::MatrixXd Xf(feasible.size(), d);
    Eigen::VectorXd yf(feasible.size());
    for (size_t i = 0; i < feasible.size(); ++i) {
        Xf.row(static_cast<Eigen::Index>(i)) = feasible[i]->x;
        yf(static_cast<Eigen::Index>(i)) = *feasible[i]->y;
    }
    const double prior_mean = yf.mean();
    const GpModel feasible_fit = GpModel::fit(Xf, yf, spec, noise_variance, prior_mean);
    if (infeasible.empty()) return feasible_fit;

    Eigen::MatrixXd X(feasible.size() + infeasible.size(), d);
    Eigen::VectorXd y(X.rows());
    X.topRows(Xf.rows()) = Xf;
    y.head(yf.size()) = yf;
    for (size_t i = 0; i < infeasible.size(); ++i) {
        const Eigen::Index row = static_cast<Eigen::Index>(feasible.size() + i);
        X.row(row) = infeasible[i]->x;
        y(row) = feasible_fit.predict(infeasible[i]->x).first;
    }
    return GpModel::fit(X, y, spec, noise_variance, prior_mean);
}

Eigen::MatrixXd latin_hypercube_design(int n, int d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::MatrixXd pts(n, d);
    std::vector<int> perm(n);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < n; ++i) pts(i, j) = (perm[i] + unif(rng)) / n;
    }
    return pts;
}

namespace {

struct EvalOutcome {
    bool feasible = false;
    double y = 0.0;
};

struct Completion {
    std::int64_t id = 0;
    double time = 0.0;
    EvalOutcome outcome;
};

class ExecutorBase {
public:
    virtual ~ExecutorBase() = default;
    virtual void submit(std::int64_t id, double duration,
                        std::function<EvalOutcome()> eval) = 0;
    virtual Completion wait_next() = 0;
    virtual double now() = 0;
};

// Discrete-event clock: the evaluation runs at submit time, the completion
// surfaces at now + duration. Ties drain in (time, id) order.
class SimExecutor final : public ExecutorBase {
public:
    void submit(std::int64_t id, double duration,
                std::function<EvalOutcome()> eval) override {
        heap_.push(Item{now_ + duration, id, eval()});
    }

    Completion wait_next() override {
        if (heap_.empty()) throw std::logic_error("wait_next with nothing in flight");
        Item item = heap_.top();
        heap_.pop();
        now_ = item.time;
        return Completion{item.id, item.time, item.outcome};
    }

    double now() override { return now_; }

private:
    struct Item {
        double time;
        std::int64_t id;
        EvalOutcome outcome;
        bool operator>(const Item& other) const {
            return std::tie(time, id) > std::tie(other.time, other.id);
        }
    };
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap_;
    double now_ = 0.0;
};

// Worker pool for real-time runs: evaluate, then sleep the sampled duration
// (scaled). Timestamps are seconds since construction.
class ThreadExecutor final : public ExecutorBase {
public:
    ThreadExecutor(int workers, double scale)
        : scale_(scale), start_(std::chrono::steady_clock::now()) {
        for (int i = 0; i < workers; ++i) {
            threads_.emplace_back([this] { worker_loop(); });
        }
    }

    ~ThreadExecutor() override {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            stopping_ = true;
        }
        task_cv_.notify_all();
        for (auto& t : threads_) t.join();
    }

    void submit(std::int64_t id, double duration,
                std::function<EvalOutcome()> eval) override {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            tasks_.push_back(Task{id, duration, std::move(eval)});
        }
        task_cv_.notify_one();
    }

    Completion wait_next() override {
        std::unique_lock<std::mutex> lock(mutex_);
        done_cv_.wait(lock, [this] { return !completions_.empty(); });
        Completion c = completions_.front();
        completions_.pop_front();
        return c;
    }

    double now() override {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    struct Task {
        std::int64_t id;
        double duration;
        std::function<EvalOutcome()> eval;
    };

    void worker_loop() {
        while (true) {
            Task task;
            {
                std::unique_lock<std::mutex> lock(mutex_);
                task_cv_.wait(lock, [this] { return stopping_ || !tasks_.empty(); });
                if (stopping_ && tasks_.empty()) return;
                task = std::move(tasks_.front());
                tasks_.pop_front();
            }
            EvalOutcome outcome = task.eval();
            std::this_thread::sleep_for(
                std::chrono::duration<double>(task.duration * scale_));
            {
                std::lock_guard<std::mutex> lock(mutex_);
                completions_.push_back(Completion{task.id, now(), outcome});
            }
            done_cv_.notify_one();
        }
    }

    double scale_;
    std::chrono::steady_clock::time_point start_;
    std::mutex mutex_;
    std::condition_variable task_cv_, done_cv_;
    std::deque<Task> tasks_;
    std::deque<Completion> completions_;
    std::vector<std::thread> threads_;
    bool stopping_ = false;
};

class Engine {
public:
    Engine(const EngineProblem& problem, const RunConfig& config, RunLogWriter& log,
           const std::string& problem_name, bool minimize_view)
        : problem_(problem),
          cfg_(config),
          log_(log),
          rng_points_(config.seed ^ 0x7b1f4a9c2d3e5f61ull),
          rng_durations_(config.seed ^ 0x1c9a7d3b5e2f8d47ull),
          rng_hedge_(config.seed ^ 0x6d2c8b4a1f9e3d75ull),
          rng_seeds_(config.seed ^ 0x3e7a1d5c9b2f4e83ull),
          rng_hyper_(config.seed ^ 0x5a4d3c2b1e9f7a61ull) {
        cfg_.ucb.dimension = problem.dimension;
        if (cfg_.realtime) {
            exec_ = std::make_unique<ThreadExecutor>(cfg_.batch.budget(),
                                                     cfg_.realtime_scale);
        } else {
            exec_ = std::make_unique<SimExecutor>();
        }
        for (int s = 0; s < cfg_.batch.budget(); ++s) free_slots_.push(s);

        json meta{{"event", "meta"},
                  {"version", 1},
                  {"problem", problem_name},
                  {"mode", cfg_.mode.name()},
                  {"seed", cfg_.seed},
                  {"batch", {cfg_.batch.acq_size, cfg_.batch.explore_size,
                             cfg_.batch.classif_size}},
                  {"budget", cfg_.batch.budget()},
                  {"dimension", problem.dimension},
                  {"minimize", minimize_view},
                  {"time_mode", cfg_.realtime ? "realtime" : "simulated"},
                  {"duration", {problem.duration_range.first, problem.duration_range.second}},
                  {"kernel", asyncbo::to_string(cfg_.kernel)}};
        meta["stop"] = json{{"max_evaluations",
                             cfg_.stop.max_evaluations ? json(*cfg_.stop.max_evaluations)
                                                       : json(nullptr)},
                            {"max_wall_clock",
                             cfg_.stop.max_wall_clock ? json(*cfg_.stop.max_wall_clock)
                                                      : json(nullptr)}};
        const int n_init = initial_design_size();
        meta["initial_design"] = n_init;
        log_.write(meta);

        if (cfg_.mode.kind != ModeKind::RandomSearch) {
            const Eigen::MatrixXd lhs =
                latin_hypercube_design(n_init, problem.dimension, rng_points_());
            for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
                initial_queue_.push_back(lhs.row(i));
            }
        }
    }

    void preload(std::vector<EvaluationRecord> completed, HedgeState hedge) {
        records_ = std::move(completed);
        hedge_ = hedge;
        completions_ = static_cast<int>(records_.size());
        initial_queue_.clear();
        for (const auto& rec : records_) {
            if (rec.status == EvalStatus::CompleteFeasible &&
                (!has_best_ || *rec.y > best_)) {
                best_ = *rec.y;
                has_best_ = true;
            }
        }
    }

    RunResult run() {
        if (cfg_.mode.kind == ModeKind::SyncBatch) {
            run_sync();
        } else {
            run_async();
        }
        RunResult result;
        result.records = std::move(records_);
        result.evaluations_completed = completions_;
        result.has_feasible_best = has_best_;
        result.best_engine_value = best_;
        result.clock_end = exec_->now();
        return result;
    }

private:
    int initial_design_size() const {
        if (cfg_.initial_design > 0) return cfg_.initial_design;
        return std::max(problem_.dimension + 1, 2 * cfg_.batch.budget());
    }

    bool stop_dispatch() {
        if (cfg_.stop.max_evaluations &&
            static_cast<int>(records_.size()) >= *cfg_.stop.max_evaluations) {
            return true;
        }
        if (cfg_.stop.max_wall_clock && exec_->now() >= *cfg_.stop.max_wall_clock) {
            return true;
        }
        return false;
    }

    bool any_feasible_completion() const {
        return std::any_of(records_.begin(), records_.end(), [](const auto& r) {
            return r.status == EvalStatus::CompleteFeasible;
        });
    }

    bool any_infeasible_completion() const {
        return std::any_of(records_.begin(), records_.end(), [](const auto& r) {
            return r.status == EvalStatus::CompleteInfeasible;
        });
    }

    bool classifier_active() const {
        return any_infeasible_completion() && cfg_.batch.classif_size > 0;
    }

    std::optional<BatchKind> next_batch() {
        if (cfg_.mode.kind == ModeKind::RandomSearch) return BatchKind::Explore;
        if (initial_next_ < initial_queue_.size()) return BatchKind::Initial;
        if (records_.empty()) return std::nullopt;
        if (!any_feasible_completion()) return BatchKind::ExploreClassif;
        return select_batch(counts_, cfg_.batch, classifier_active());
    }

    void run_async() {
        while (true) {
            std::optional<BatchKind> plan;
            if (!stop_dispatch() && inflight_ < cfg_.batch.budget()) plan = next_batch();
            if (plan) {
                dispatch(*plan);
            } else if (inflight_ > 0) {
                harvest(exec_->wait_next());
            } else {
                break;
            }
        }
    }

    void run_sync() {
        // Initial design in synchronous rounds.
        while (initial_next_ < initial_queue_.size() && !stop_dispatch()) {
            const int n = std::min<int>(cfg_.batch.budget(),
                                        static_cast<int>(initial_queue_.size()) -
                                            static_cast<int>(initial_next_));
            for (int i = 0; i < n && !stop_dispatch(); ++i) dispatch(BatchKind::Initial);
            drain();
        }
        while (!stop_dispatch()) {
            std::vector<BatchKind> plan;
            if (!any_feasible_completion()) {
                for (int i = 0; i < cfg_.batch.budget(); ++i) {
                    plan.push_back(BatchKind::ExploreClassif);
                }
            } else {
                for (int i = 0; i < cfg_.batch.acq_size; ++i) {
                    plan.push_back(BatchKind::Acquisition);
                }
                for (int i = 0; i < cfg_.batch.explore_size; ++i) {
                    plan.push_back(BatchKind::Explore);
                }
                if (classifier_active()) {
                    for (int i = 0; i < cfg_.batch.classif_size; ++i) {
                        plan.push_back(BatchKind::ExploreClassif);
                    }
                }
            }
            bool dispatched = false;
            for (BatchKind b : plan) {
                if (stop_dispatch()) break;
                dispatch(b);
                dispatched = true;
            }
            drain();
            if (!dispatched) break;
        }
        drain();
    }

    void drain() {
        while (inflight_ > 0) harvest(exec_->wait_next());
    }

    void dispatch(BatchKind batch) {
        const std::int64_t id = static_cast<std::int64_t>(records_.size());
        EvaluationRecord rec;
        rec.id = id;
        rec.batch = batch;

        bool fallback_explore = false;
        if (cfg_.mode.kind == ModeKind::RandomSearch) {
            rec.x = uniform_point();
        } else if (batch == BatchKind::Initial) {
            rec.x = initial_queue_[initial_next_++];
        } else {
            if (!models_fresh_) refresh_models();
            auto [x, kind, fb] = propose(batch, id);
            rec.x = std::move(x);
            rec.acquisition = kind;
            fallback_explore = fb;
        }

        rec.slot = free_slots_.top();
        free_slots_.pop();
        rec.dispatched_at = exec_->now();

        std::uniform_real_distribution<double> dur(problem_.duration_range.first,
                                                   problem_.duration_range.second);
        double duration = dur(rng_durations_);
        bool force_infeasible = false;
        if (cfg_.eval_cutoff && duration > *cfg_.eval_cutoff) {
            duration = *cfg_.eval_cutoff;
            force_infeasible = true;
        }

        json event{{"event", "dispatch"},
                   {"id", id},
                   {"t", rec.dispatched_at},
                   {"batch", asyncbo::to_string(batch)},
                   {"slot", rec.slot},
                   {"inflight", inflight_ + 1}};
        if (rec.acquisition) event["acq"] = asyncbo::to_string(*rec.acquisition);
        if (fallback_explore) event["fallback"] = "explore";
        std::vector<double> xv(rec.x.data(), rec.x.data() + rec.x.size());
        event["x"] = xv;
        log_.write(event);

        const Eigen::VectorXd x = rec.x;
        const EngineProblem* problem = &problem_;
        auto eval = [x, problem, force_infeasible]() -> EvalOutcome {
            if (force_infeasible) return {false, 0.0};
            if (!problem->known.empty() && problem->known.indicator(x) == 0.0) {
                return {false, 0.0};
            }
            try {
                const double y = problem->evaluate(x);
                if (!std::isfinite(y)) return {false, 0.0};
                return {true, y};
            } catch (const std::exception&) {
                return {false, 0.0};
            }
        };

        records_.push_back(std::move(rec));
        if (batch != BatchKind::Initial) counts_[static_cast<int>(batch)] += 1;
        ++inflight_;
        models_fresh_ = false;
        exec_->submit(id, duration, eval);
    }

    void harvest(const Completion& c) {
        EvaluationRecord& rec = records_[static_cast<size_t>(c.id)];
        rec.completed_at = c.time;
        rec.hallucinated_y.reset();
        if (rec.batch != BatchKind::Initial) counts_[static_cast<int>(rec.batch)] -= 1;
        --inflight_;
        free_slots_.push(rec.slot);
        ++completions_;
        hedge_.completed = completions_;

        bool is_new_best = false;
        if (c.outcome.feasible) {
            rec.status = EvalStatus::CompleteFeasible;
            rec.y = c.outcome.y;
            is_new_best = !has_best_ || c.outcome.y > best_;
            if (is_new_best) {
                best_ = c.outcome.y;
                has_best_ = true;
            }
        } else {
            rec.status = EvalStatus::CompleteInfeasible;
        }

        if (cfg_.mode.kind == ModeKind::AsyncHedge &&
            rec.batch == BatchKind::Acquisition && rec.acquisition) {
            record_outcome(hedge_, *rec.acquisition, c.outcome.feasible, is_new_best);
        }

        json event{{"event", "complete"},
                   {"id", c.id},
                   {"t", c.time},
                   {"feasible", c.outcome.feasible},
                   {"new_best", is_new_best}};
        event["y"] = c.outcome.feasible ? json(c.outcome.y) : json(nullptr);
        event["best"] = has_best_ ? json(best_) : json(nullptr);
        log_.write(event);

        if (cfg_.mode.kind != ModeKind::RandomSearch) {
            ++harvests_since_hyperfit_;
            refresh_models();
        }
    }

    void refresh_models() {
        const double t = exec_->now();
        json event{{"event", "refit"}, {"t", t}};

        int n_feasible = 0, n_infeasible = 0, n_pending = 0;
        for (const auto& rec : records_) {
            if (rec.status == EvalStatus::CompleteFeasible) ++n_feasible;
            if (rec.status == EvalStatus::CompleteInfeasible) ++n_infeasible;
            if (rec.status == EvalStatus::Pending) ++n_pending;
        }
        event["n_feasible"] = n_feasible;
        event["n_infeasible"] = n_infeasible;

        const bool hyperfit_due =
            !obj_spec_ || harvests_since_hyperfit_ >= cfg_.hyperfit_every;

        if (n_feasible == 0) {
            obj_gp_.reset();
            fit_classifier(n_infeasible > 0, hyperfit_due);
            if (hyperfit_due) harvests_since_hyperfit_ = 0;
            event["objective"] = false;
            event["classifier"] = clf_.has_value();
            event["hyperfit"] = hyperfit_due;
            log_.write(event);
            models_fresh_ = true;
            return;
        }

        Eigen::MatrixXd Xf(n_feasible, problem_.dimension);
        Eigen::VectorXd yf(n_feasible);
        Eigen::Index row = 0;
        for (const auto& rec : records_) {
            if (rec.status != EvalStatus::CompleteFeasible) continue;
            Xf.row(row) = rec.x;
            yf(row) = *rec.y;
            ++row;
        }
        if (hyperfit_due) {
            const auto [Xh, yh] = hyperfit_subset(Xf, yf);
            obj_spec_ = fit_hyperparameters(Xh, yh, cfg_.kernel,
                                            default_hyper_bounds(yh),
                                            cfg_.objective_noise, 8, rng_hyper_());
            harvests_since_hyperfit_ = 0;
        }

        const GpModel interpolated =
            interpolate_objective_gp(records_, *obj_spec_, cfg_.objective_noise);
        std::vector<std::int64_t> halluc_ids;
        for (auto& rec : records_) {
            if (rec.status == EvalStatus::Pending) {
                rec.hallucinated_y = interpolated.predict(rec.x).first;
                halluc_ids.push_back(rec.id);
            }
        }
        const auto [X, y] = hallucinate(records_, interpolated);
        obj_gp_ = GpModel::fit(X, y, *obj_spec_, cfg_.objective_noise, yf.mean());

        fit_classifier(n_infeasible > 0, hyperfit_due);

        event["objective"] = true;
        event["n_train"] = static_cast<int>(records_.size());
        event["halluc_ids"] = halluc_ids;
        event["classifier"] = clf_.has_value();
        event["hyperfit"] = hyperfit_due;
        log_.write(event);
        models_fresh_ = true;
    }

    // Pending points count as feasible for the classifier until completion.
    void fit_classifier(bool have_infeasible, bool hyperfit_due) {
        if (!have_infeasible || records_.empty()) {
            clf_.reset();
            return;
        }
        Eigen::MatrixXd X(records_.size(), problem_.dimension);
        std::vector<bool> labels(records_.size());
        Eigen::Index row = 0;
        for (const auto& rec : records_) {
            X.row(row) = rec.x;
            labels[static_cast<size_t>(row)] =
                rec.status != EvalStatus::CompleteInfeasible;
            ++row;
        }
        if (hyperfit_due || !clf_spec_) {
            Eigen::VectorXd targets(labels.size());
            for (size_t i = 0; i < labels.size(); ++i) targets(i) = labels[i] ? 1.0 : -1.0;
            const auto [Xh, th] = hyperfit_subset(X, targets);
            clf_spec_ = fit_hyperparameters(Xh, th, cfg_.kernel,
                                            default_hyper_bounds(th),
                                            cfg_.classifier_noise, 8, rng_hyper_());
        }
        clf_ = FeasibilityModel::fit(X, labels, cfg_.classifier_noise, clf_spec_);
    }

    // Hyperparameter search cost is cubic in n; above this size the search
    // runs on an evenly strided subset while the GP itself keeps all data.
    static std::pair<Eigen::MatrixXd, Eigen::VectorXd> hyperfit_subset(
        const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
        constexpr Eigen::Index kMaxHyperfitPoints = 80;
        const Eigen::Index n = X.rows();
        if (n <= kMaxHyperfitPoints) return {X, y};
        Eigen::MatrixXd Xs(kMaxHyperfitPoints, X.cols());
        Eigen::VectorXd ys(kMaxHyperfitPoints);
        for (Eigen::Index i = 0; i < kMaxHyperfitPoints; ++i) {
            const Eigen::Index src = (i * n) / kMaxHyperfitPoints;
            Xs.row(i) = X.row(src);
            ys(i) = y(src);
        }
        return {Xs, ys};
    }

    Eigen::VectorXd uniform_point() {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        Eigen::VectorXd x(problem_.dimension);
        for (int i = 0; i < problem_.dimension; ++i) x(i) = unif(rng_points_);
        return x;
    }

    double current_f_best() const {
        if (has_best_) return best_;
        double h = 0.0;
        bool found = false;
        for (const auto& rec : records_) {
            if (rec.hallucinated_y && (!found || *rec.hallucinated_y > h)) {
                h = *rec.hallucinated_y;
                found = true;
            }
        }
        return found ? h : 0.0;
    }

    std::function<double(const Eigen::VectorXd&)> explore_score() const {
        const GpModel& gp = *obj_gp_;
        const KnownConstraintSet& known = problem_.known;
        return [&gp, &known](const Eigen::VectorXd& x) {
            if (!known.empty() && known.indicator(x) == 0.0) return 0.0;
            return gp.predict(x).second;
        };
    }

    std::tuple<Eigen::VectorXd, std::optional<AcquisitionKind>, bool> propose(
        BatchKind batch, std::int64_t id) {
        CmaesConfig inner = cfg_.inner;
        inner.seed = rng_seeds_();

        if (batch == BatchKind::ExploreClassif) {
            if (!clf_) return {uniform_point(), std::nullopt, false};
            const FeasibilityModel& clf = *clf_;
            const KnownConstraintSet& known = problem_.known;
            auto score = [&clf, &known](const Eigen::VectorXd& x) {
                if (!known.empty() && known.indicator(x) == 0.0) return 0.0;
                return clf.classification_variance(x);
            };
            return {maximize(score, problem_.dimension, inner).x, std::nullopt, false};
        }

        if (batch == BatchKind::Explore) {
            return {maximize(explore_score(), problem_.dimension, inner).x,
                    std::nullopt, false};
        }

        // Acquisition batch.
        AcquisitionKind kind = cfg_.mode.acquisition;
        if (cfg_.mode.kind == ModeKind::AsyncHedge) {
            const auto pmf = portfolio_pmf(hedge_);
            kind = sample_acquisition(hedge_, rng_hedge_);
            json event{{"event", "hedge_draw"},
                       {"id", id},
                       {"t", exec_->now()},
                       {"eta", hedge_eta(hedge_.completed, kPortfolioSize)},
                       {"gains", {hedge_.gains[0], hedge_.gains[1], hedge_.gains[2]}},
                       {"pmf", {pmf[0], pmf[1], pmf[2]}},
                       {"chosen", asyncbo::to_string(kind)}};
            log_.write(event);
        }

        const GpModel& gp = *obj_gp_;
        const KnownConstraintSet& known = problem_.known;
        const double f_best = current_f_best();
        const std::int64_t n_dispatched = static_cast<std::int64_t>(records_.size());
        const UcbSchedule schedule = cfg_.ucb;

        auto p_feasible = [this](const Eigen::VectorXd& x) {
            return clf_ ? clf_->prob_feasible(x) : 1.0;
        };

        ScoreFn score;
        if (kind == AcquisitionKind::PI) {
            score = [&gp, &known, f_best, p_feasible](const Eigen::VectorXd& x) {
                const auto [mean, var] = gp.predict(x);
                const double raw = acq_pi(mean, std::sqrt(var), f_best);
                return constrained_acquisition(raw, x, known, p_feasible(x));
            };
        } else if (kind == AcquisitionKind::EI) {
            score = [&gp, &known, f_best, p_feasible](const Eigen::VectorXd& x) {
                const auto [mean, var] = gp.predict(x);
                const double raw = acq_ei(mean, std::sqrt(var), f_best);
                return constrained_acquisition(raw, x, known, p_feasible(x));
            };
        } else {
            // UCB can be negative; shift by the minimum over a fixed probe
            // sample so the product with the probabilities keeps the argmax.
            std::mt19937_64 probe_rng(inner.seed ^ 0x5bd1e995u);
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            double baseline = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 256; ++i) {
                Eigen::VectorXd p(problem_.dimension);
                for (int j = 0; j < problem_.dimension; ++j) p(j) = unif(probe_rng);
                const auto [mean, var] = gp.predict(p);
                baseline = std::min(
                    baseline, acq_ucb(mean, std::sqrt(var), n_dispatched, schedule));
            }
            score = [&gp, &known, p_feasible, baseline, n_dispatched,
                     schedule](const Eigen::VectorXd& x) {
                const auto [mean, var] = gp.predict(x);
                const double raw = std::max(
                    acq_ucb(mean, std::sqrt(var), n_dispatched, schedule) - baseline,
                    0.0);
                return constrained_acquisition(raw, x, known, p_feasible(x));
            };
        }

        MaximizeResult res = maximize(score, problem_.dimension, inner);
        if (res.all_zero) {
            // Fully infeasible landscape: fall back to objective exploration.
            CmaesConfig retry = cfg_.inner;
            retry.seed = rng_seeds_();
            res = maximize(explore_score(), problem_.dimension, retry);
            return {res.x, kind, true};
        }
        return {res.x, kind, false};
    }

    const EngineProblem& problem_;
    RunConfig cfg_;
    RunLogWriter& log_;

    std::vector<EvaluationRecord> records_;
    std::array<int, 3> counts_{0, 0, 0};
    int inflight_ = 0;
    int completions_ = 0;
    std::vector<Eigen::VectorXd> initial_queue_;
    size_t initial_next_ = 0;

    std::optional<KernelSpec> obj_spec_, clf_spec_;
    std::optional<GpModel> obj_gp_;
    std::optional<FeasibilityModel> clf_;
    bool models_fresh_ = false;
    int harvests_since_hyperfit_ = 0;

    bool has_best_ = false;
    double best_ = -std::numeric_limits<double>::infinity();
    HedgeState hedge_;

    std::mt19937_64 rng_points_, rng_durations_, rng_hedge_, rng_seeds_, rng_hyper_;
    std::unique_ptr<ExecutorBase> exec_;
    std::priority_queue<int, std::vector<int>, std::greater<int>> free_slots_;
};

}  // namespace

RunResult run(const EngineProblem& problem, const RunConfig& config, RunLogWriter& log,
              const std::string& problem_name, bool minimize_view) {
    Engine engine(problem, config, log, problem_name, minimize_view);
    return engine.run();
}

RunResult resume_run(const EngineProblem& problem, const RunConfig& config,
                     const std::vector<nlohmann::json>& prior_events, RunLogWriter& log,
                     const std::string& problem_name, bool minimize_view) {
    struct Dispatched {
        Eigen::VectorXd x;
        BatchKind batch = BatchKind::Initial;
        std::optional<AcquisitionKind> acq;
        double dispatched_at = 0.0;
    };
    std::map<std::int64_t, Dispatched> dispatched;
    struct Done {
        std::int64_t id;
        double t;
        bool feasible;
        double y;
    };
    std::vector<Done> completions;

    for (const auto& e : prior_events) {
        const std::string kind = e.value("event", "");
        if (kind == "dispatch") {
            Dispatched d;
            const auto xv = e.at("x").get<std::vector<double>>();
            d.x = Eigen::Map<const Eigen::VectorXd>(xv.data(),
                                                    static_cast<Eigen::Index>(xv.size()));
            const std::string b = e.at("batch").get<std::string>();
            d.batch = b == "acquisition"       ? BatchKind::Acquisition
                      : b == "explore"         ? BatchKind::Explore
                      : b == "explore_classif" ? BatchKind::ExploreClassif
                                               : BatchKind::Initial;
            if (e.contains("acq") && !e.at("acq").is_null()) {
                d.acq = acquisition_from_string(e.at("acq").get<std::string>());
            }
            d.dispatched_at = e.at("t").get<double>();
            dispatched[e.at("id").get<std::int64_t>()] = std::move(d);
        } else if (kind == "complete") {
            Done c{e.at("id").get<std::int64_t>(), e.at("t").get<double>(),
                   e.at("feasible").get<bool>(), 0.0};
            if (c.feasible) c.y = e.at("y").get<double>();
            completions.push_back(c);
        }
    }
    std::stable_sort(completions.begin(), completions.end(),
                     [](const Done& a, const Done& b) { return a.t < b.t; });

    // Unfinished dispatches are dropped; the engine proposes afresh. Hedge
    // gains are replayed from the completion order. The new log re-emits the
    // reconstructed records (marked "replayed") so it stands alone.
    Engine engine(problem, config, log, problem_name, minimize_view);

    std::vector<EvaluationRecord> records;
    HedgeState hedge;
    bool has_best = false;
    double best = 0.0;
    for (const auto& c : completions) {
        const auto it = dispatched.find(c.id);
        if (it == dispatched.end()) continue;
        EvaluationRecord rec;
        rec.id = static_cast<std::int64_t>(records.size());
        rec.x = it->second.x;
        rec.batch = it->second.batch;
        rec.acquisition = it->second.acq;
        rec.dispatched_at = it->second.dispatched_at;
        rec.completed_at = c.t;
        rec.status =
            c.feasible ? EvalStatus::CompleteFeasible : EvalStatus::CompleteInfeasible;
        if (c.feasible) rec.y = c.y;
        const bool is_new_best = c.feasible && (!has_best || c.y > best);
        if (is_new_best) {
            best = c.y;
            has_best = true;
        }
        if (rec.batch == BatchKind::Acquisition && rec.acquisition) {
            record_outcome(hedge, *rec.acquisition, c.feasible, is_new_best);
        }

        json d{{"event", "dispatch"}, {"id", rec.id},   {"t", 0.0},
               {"replayed", true},    {"slot", -1},     {"inflight", 1},
               {"batch", to_string(rec.batch)}};
        if (rec.acquisition) d["acq"] = to_string(*rec.acquisition);
        std::vector<double> xv(rec.x.data(), rec.x.data() + rec.x.size());
        d["x"] = xv;
        log.write(d);
        json e{{"event", "complete"},   {"id", rec.id}, {"t", 0.0},
               {"replayed", true},      {"feasible", c.feasible},
               {"new_best", is_new_best}};
        e["y"] = c.feasible ? json(c.y) : json(nullptr);
        e["best"] = has_best ? json(best) : json(nullptr);
        log.write(e);

        records.push_back(std::move(rec));
    }
    hedge.completed = static_cast<std::int64_t>(records.size());

    engine.preload(std::move(records), hedge);
    return engine.run();
}

}  // namespace asyncbo
