#include "asyncbo/run_log.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace asyncbo {

using nlohmann::json;

void RunLogWriter::write(const json& event) {
    if (out_ == nullptr) return;
    *out_ << event.dump() << '\n';
}

std::vector<json> parse_run_log(std::istream& in) {
    std::vector<json> events;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        events.push_back(json::parse(line));
    }
    return events;
}

std::vector<json> load_run_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open run log: " + path);
    return parse_run_log(in);
}

ReplayReport replay_check(const std::vector<json>& events) {
    ReplayReport report;
    if (events.empty() || events.front().value("event", "") != "meta") {
        report.fail("log does not start with a meta event");
        return report;
    }
    const json& meta = events.front();
    const int budget = meta.at("budget").get<int>();
    const std::vector<int> sizes = meta.at("batch").get<std::vector<int>>();
    const std::string mode = meta.at("mode").get<std::string>();
    const bool random_mode = mode == "random";

    std::set<std::int64_t> pending;
    std::map<std::int64_t, std::string> batch_of;
    std::map<std::string, int> counts{{"acquisition", 0},
                                      {"explore", 0},
                                      {"explore_classif", 0}};
    bool any_feasible = false;
    bool any_infeasible = false;
    double best = -std::numeric_limits<double>::infinity();
    bool have_best = false;

    auto expected_batch = [&]() -> std::string {
        if (!any_feasible) return "explore_classif";
        if (counts["acquisition"] < sizes[0]) return "acquisition";
        if (counts["explore"] < sizes[1]) return "explore";
        if (any_infeasible && sizes[2] > 0 && counts["explore_classif"] < sizes[2]) {
            return "explore_classif";
        }
        return "";
    };

    for (size_t idx = 1; idx < events.size(); ++idx) {
        const json& e = events[idx];
        const std::string kind = e.value("event", "");
        if (kind == "dispatch") {
            ++report.dispatches;
            const std::int64_t id = e.at("id").get<std::int64_t>();
            const std::string batch = e.at("batch").get<std::string>();
            if (static_cast<int>(pending.size()) + 1 > budget) {
                report.fail("budget exceeded at dispatch id " + std::to_string(id));
            }
            if (pending.count(id)) {
                report.fail("duplicate dispatch id " + std::to_string(id));
            }
            if (!random_mode && batch != "initial" && !e.value("replayed", false)) {
                const std::string expected = expected_batch();
                if (expected.empty()) {
                    report.fail("dispatch id " + std::to_string(id) +
                                " with no open batch slot");
                } else if (batch != expected) {
                    report.fail("priority violated at id " + std::to_string(id) +
                                ": dispatched " + batch + ", expected " + expected);
                }
            }
            pending.insert(id);
            batch_of[id] = batch;
            if (counts.count(batch)) counts[batch] += 1;
        } else if (kind == "complete") {
            ++report.completions;
            const std::int64_t id = e.at("id").get<std::int64_t>();
            if (!pending.count(id)) {
                report.fail("completion for unknown id " + std::to_string(id));
                continue;
            }
            pending.erase(id);
            const std::string batch = batch_of[id];
            if (counts.count(batch)) counts[batch] -= 1;
            const bool feasible = e.at("feasible").get<bool>();
            if (feasible) {
                any_feasible = true;
                if (!e.contains("y") || e.at("y").is_null()) {
                    report.fail("feasible completion without y, id " + std::to_string(id));
                    continue;
                }
                const double y = e.at("y").get<double>();
                const bool new_best = e.value("new_best", false);
                const bool should_be_best = !have_best || y > best;
                if (new_best != should_be_best) {
                    report.fail("new_best flag wrong at id " + std::to_string(id));
                }
                if (new_best) {
                    best = y;
                    have_best = true;
                }
                if (e.contains("best") && !e.at("best").is_null()) {
                    const double logged_best = e.at("best").get<double>();
                    if (logged_best + 1e-12 < best) {
                        report.fail("best-so-far not monotone at id " + std::to_string(id));
                    }
                    best = std::max(best, logged_best);
                }
            } else {
                any_infeasible = true;
                if (e.contains("y") && !e.at("y").is_null()) {
                    report.fail("infeasible completion carries y, id " + std::to_string(id));
                }
            }
        } else if (kind == "refit") {
            ++report.refits;
            if (!e.value("objective", false)) continue;
            std::set<std::int64_t> halluc;
            for (const auto& h : e.at("halluc_ids")) {
                halluc.insert(h.get<std::int64_t>());
            }
            if (halluc != pending) {
                report.fail("hallucinated set != pending set at refit #" +
                            std::to_string(report.refits));
            }
            const int n_train = e.at("n_train").get<int>();
            if (n_train != report.completions + static_cast<int>(pending.size())) {
                report.fail("training set is not one entry per dispatched point at refit #" +
                            std::to_string(report.refits));
            }
        }
    }
    if (!pending.empty()) {
        report.fail("run ended with undrained pending evaluations");
    }
    return report;
}

namespace {

struct RunKey {
    std::string problem;
    std::string mode;
    std::int64_t seed = 0;
};

RunKey key_of(const json& meta) {
    return {meta.value("problem", "?"), meta.value("mode", "?"),
            meta.value("seed", std::int64_t{0})};
}

}  // namespace

std::vector<std::string> export_plot_data(const std::vector<std::string>& log_paths,
                                          const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::ofstream conv_iter(fs::path(out_dir) / "convergence_by_iteration.csv");
    std::ofstream conv_time(fs::path(out_dir) / "convergence_by_time.csv");
    std::ofstream portfolio(fs::path(out_dir) / "portfolio.csv");
    std::ofstream occupancy(fs::path(out_dir) / "occupancy.csv");

    conv_iter << "problem,mode,seed,iteration,t,best_objective\n";
    conv_time << "problem,mode,seed,t,best_objective\n";
    portfolio << "problem,mode,seed,t,id,chosen,p_pi,p_ei,p_ucb,g_pi,g_ei,g_ucb,eta\n";
    occupancy << "problem,mode,seed,slot,id,batch,start,end\n";

    for (const auto& path : log_paths) {
        const auto events = load_run_log(path);
        if (events.empty() || events.front().value("event", "") != "meta") continue;
        const json& meta = events.front();
        const RunKey k = key_of(meta);
        const bool minimize = meta.value("minimize", true);
        const std::string prefix =
            k.problem + "," + k.mode + "," + std::to_string(k.seed) + ",";

        std::map<std::int64_t, std::pair<double, std::string>> dispatch_info;
        std::map<std::int64_t, int> slot_of;
        int iteration = 0;
        bool have_best = false;
        double best = 0.0;
        for (size_t i = 1; i < events.size(); ++i) {
            const json& e = events[i];
            const std::string kind = e.value("event", "");
            if (kind == "dispatch") {
                const std::int64_t id = e.at("id").get<std::int64_t>();
                dispatch_info[id] = {e.at("t").get<double>(),
                                     e.at("batch").get<std::string>()};
                slot_of[id] = e.value("slot", -1);
            } else if (kind == "complete") {
                ++iteration;
                const std::int64_t id = e.at("id").get<std::int64_t>();
                const double t = e.at("t").get<double>();
                if (e.at("feasible").get<bool>() && e.contains("y") &&
                    !e.at("y").is_null()) {
                    const double y = e.at("y").get<double>();
                    if (!have_best || y > best) {
                        best = y;
                        have_best = true;
                    }
                }
                if (have_best) {
                    const double obj = minimize ? -best : best;
                    conv_iter << prefix << iteration << "," << t << "," << obj << "\n";
                    conv_time << prefix << t << "," << obj << "\n";
                }
                const auto it = dispatch_info.find(id);
                if (it != dispatch_info.end()) {
                    occupancy << prefix << slot_of[id] << "," << id << ","
                              << it->second.second << "," << it->second.first << ","
                              << t << "\n";
                }
            } else if (kind == "hedge_draw") {
                const auto& pmf = e.at("pmf");
                const auto& gains = e.at("gains");
                portfolio << prefix << e.at("t").get<double>() << ","
                          << e.at("id").get<std::int64_t>() << ","
                          << e.at("chosen").get<std::string>() << "," << pmf[0] << ","
                          << pmf[1] << "," << pmf[2] << "," << gains[0] << ","
                          << gains[1] << "," << gains[2] << ","
                          << e.at("eta").get<double>() << "\n";
            }
        }
    }
    return {(fs::path(out_dir) / "convergence_by_iteration.csv").string(),
            (fs::path(out_dir) / "convergence_by_time.csv").string(),
            (fs::path(out_dir) / "portfolio.csv").string(),
            (fs::path(out_dir) / "occupancy.csv").string()};
}

}  // namespace asyncbo
