#pragma once

#include "stabilrl/problems.hpp"
#include "stabilrl/supervisor.hpp"

#include <iosfwd>
#include <map>
#include <optional>

namespace stabilrl {

struct RunConfig {
    std::string problem = "traction";
    std::optional<Vec> x0;
    int horizon = 0;     // 0: problem default
    double delta = 0.0;  // 0: problem default
    UpdateMode update_mode = UpdateMode::Lsq;
    bool update_mode_set = false; // false: use the problem default
    ActorMode actor_mode = ActorMode::Optimize;
    int sample_buffer = 1;
    unsigned seed = 0; // reserved for randomized estimators
    std::string output;
    std::vector<std::pair<std::string, double>> problem_overrides;
};

struct SweepSpec {
    std::vector<std::pair<double, double>> ranges; // one per state coordinate
    std::vector<int> resolution;                   // >= 2 per swept axis

    void validate(int n) const;
};

struct SweepRow {
    Vec x0;
    double c_pct = std::numeric_limits<double>::quiet_NaN();
    int K_u = -1;
    int K_mu = -1;
    int fallback_count = 0;
    std::string error; // "unreached" or a propagated failure; empty on success
    bool ok() const { return error.empty(); }
};

// Transient-cost ratio: accumulated stage cost of the learned run up to its
// own reach time over the backup run's accumulated cost up to its reach
// time. Empty when either run never settles into the target ball.
std::optional<double> cost_ratio(const TrajectoryLog& learned, const TrajectoryLog& backup);

std::vector<SweepRow> sweep(const BenchmarkProblem& prob, const SweepSpec& spec,
                            const LoopConfig& cfg, bool parallel = true);

// CSV with the fixed trajectory schema; floats carry 17 significant digits.
void emit_csv(const TrajectoryLog& log, std::ostream& os);
void emit_csv(const TrajectoryLog& log, const std::string& path);
void emit_csv(const std::vector<SweepRow>& table, std::ostream& os);
void emit_csv(const std::vector<SweepRow>& table, const std::string& path);

// Round-trip parser for the trajectory CSV (testing and downstream tools).
TrajectoryLog parse_trajectory_csv(std::istream& is);

// Plain-text key/value bounds report.
void write_bounds_report(const StabilityBounds& B, std::ostream& os);

// Flat key = value config file; '#' starts a comment. Returns string pairs;
// numeric interpretation happens at use sites.
std::map<std::string, std::string> parse_config_file(const std::string& path);

LoopConfig loop_config_from(const RunConfig& rc, const BenchmarkProblem& prob);

} // namespace stabilrl
