#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace asyncbo {

// Append-only line-delimited JSON event stream. One object per line:
// meta, dispatch, hedge_draw, complete, refit. Field values in simulated
// mode are fully determined by the run config and seed.
class RunLogWriter {
public:
    explicit RunLogWriter(std::ostream* out) : out_(out) {}

    void write(const nlohmann::json& event);

private:
    std::ostream* out_ = nullptr;
};

std::vector<nlohmann::json> parse_run_log(std::istream& in);
std::vector<nlohmann::json> load_run_log(const std::string& path);

// Event-log replay verification of the scheduler contract: budget never
// exceeded, batch priority respected, best-so-far monotone, and no
// hallucinated value surviving its completion.
struct ReplayReport {
    bool ok = true;
    std::vector<std::string> violations;
    int dispatches = 0;
    int completions = 0;
    int refits = 0;

    void fail(std::string message) {
        ok = false;
        violations.push_back(std::move(message));
    }
};

ReplayReport replay_check(const std::vector<nlohmann::json>& events);

// One CSV per figure family. Returns the paths written.
std::vector<std::string> export_plot_data(const std::vector<std::string>& log_paths,
                                          const std::string& out_dir);

}  // namespace asyncbo
