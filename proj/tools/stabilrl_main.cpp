// Command-line driver: single runs, initial-state sweeps, the backup decay
// certificate, and learned-vs-backup cost comparison.

#include "stabilrl/runner.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

using namespace stabilrl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitStability = 1;
constexpr int kExitIo = 2;
constexpr int kExitConfig = 3;

struct CliOptions {
    std::string config_path;
    std::string problem = "traction";
    std::vector<double> x0;
    int horizon = 0;
    double delta = 0.0;
    std::string update_mode;
    std::string actor_mode;
    int sample_buffer = 1;
    std::string output;
    std::vector<std::string> overrides; // key=value problem parameter overrides
    // sweep
    std::vector<double> sweep_min, sweep_max;
    std::vector<int> sweep_res;
    bool no_parallel = false;
    // certify
    double cert_delta = 0.0;
};

// Config file first (lowest precedence), then explicit flags win.
void apply_config_file(const std::string& path, CliOptions& o, const CLI::App& cmd) {
    const auto kv = parse_config_file(path);
    auto has_flag = [&](const std::string& name) {
        const CLI::Option* opt = cmd.get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    auto num = [&](const std::string& key, double& field, const std::string& flag) {
        auto it = kv.find(key);
        if (it != kv.end() && !has_flag(flag)) field = std::stod(it->second);
    };
    auto str = [&](const std::string& key, std::string& field, const std::string& flag) {
        auto it = kv.find(key);
        if (it != kv.end() && !has_flag(flag)) field = it->second;
    };
    str("problem", o.problem, "--problem");
    str("output", o.output, "--output");
    str("update_mode", o.update_mode, "--update-mode");
    str("actor_mode", o.actor_mode, "--actor-mode");
    num("delta", o.delta, "--delta");
    double hor = o.horizon, buf = o.sample_buffer;
    num("horizon", hor, "--horizon");
    num("sample_buffer", buf, "--samples");
    o.horizon = static_cast<int>(hor);
    o.sample_buffer = static_cast<int>(buf);
    if (!has_flag("--x0")) {
        auto it = kv.find("x0");
        if (it != kv.end()) {
            o.x0.clear();
            std::stringstream ss(it->second);
            std::string tok;
            while (std::getline(ss, tok, ' '))
                if (!tok.empty()) o.x0.push_back(std::stod(tok));
        }
    }
    // problem parameter overrides: any dotted key passes through
    for (const auto& [k, v] : kv)
        if (k.find('.') != std::string::npos) o.overrides.push_back(k + "=" + v);
}

RunConfig build_run_config(const CliOptions& o) {
    RunConfig rc;
    rc.problem = o.problem;
    if (!o.x0.empty()) {
        Vec x0(static_cast<int>(o.x0.size()));
        for (size_t i = 0; i < o.x0.size(); ++i) x0(static_cast<int>(i)) = o.x0[i];
        rc.x0 = x0;
    }
    rc.horizon = o.horizon;
    rc.delta = o.delta;
    if (!o.update_mode.empty()) {
        rc.update_mode_set = true;
        if (o.update_mode == "lsq")
            rc.update_mode = UpdateMode::Lsq;
        else if (o.update_mode == "gd")
            rc.update_mode = UpdateMode::Gd;
        else
            throw ConfigError("update_mode must be lsq or gd");
    }
    if (!o.actor_mode.empty()) {
        if (o.actor_mode == "optimize")
            rc.actor_mode = ActorMode::Optimize;
        else if (o.actor_mode == "policy_gradient")
            rc.actor_mode = ActorMode::PolicyGradient;
        else
            throw ConfigError("actor_mode must be optimize or policy_gradient");
    }
    rc.sample_buffer = o.sample_buffer;
    rc.output = o.output;
    for (const std::string& ov : o.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) throw ConfigError("override must be key=value: " + ov);
        rc.problem_overrides.emplace_back(ov.substr(0, eq), std::stod(ov.substr(eq + 1)));
    }
    return rc;
}

void warn_if_delta_large(const StabilityBounds& B) {
    if (!B.delta_admissible)
        std::cerr << "warning: delta = " << B.delta_used
                  << " exceeds the computed admissible bound delta_bar = " << B.delta_bar
                  << "; the runtime decay diagnostics remain the effective check\n";
}

int cmd_run(const CliOptions& o) {
    const RunConfig rc = build_run_config(o);
    const BenchmarkProblem prob = make_problem(rc.problem, rc.problem_overrides);
    LoopConfig lc = loop_config_from(rc, prob);
    const Vec x0 = rc.x0.value_or(prob.x0_default);
    warn_if_delta_large(compute_bounds(prob, lc.delta));
    const TrajectoryLog log = run(prob, lc, x0);
    if (!rc.output.empty())
        emit_csv(log, rc.output);
    else
        emit_csv(log, std::cout);
    std::cerr << "run: " << log.steps.size() << " steps, "
              << (log.reached ? "reached target ball at step " + std::to_string(log.reach_step)
                              : std::string("target ball not reached"))
              << ", fallbacks " << log.fallback_count << ", core steps " << log.core_count
              << "\n";
    return kExitOk;
}

int cmd_sweep(const CliOptions& o) {
    const RunConfig rc = build_run_config(o);
    const BenchmarkProblem prob = make_problem(rc.problem, rc.problem_overrides);
    LoopConfig lc = loop_config_from(rc, prob);

    SweepSpec spec;
    const size_t n = o.sweep_min.size();
    if (o.sweep_max.size() != n || o.sweep_res.size() != n)
        throw ConfigError("sweep: --min/--max/--res must have one entry per coordinate");
    for (size_t i = 0; i < n; ++i) {
        spec.ranges.emplace_back(o.sweep_min[i], o.sweep_max[i]);
        spec.resolution.push_back(o.sweep_res[i]);
    }
    warn_if_delta_large(compute_bounds(prob, lc.delta));
    const auto rows = sweep(prob, spec, lc, !o.no_parallel);
    if (!rc.output.empty())
        emit_csv(rows, rc.output);
    else
        emit_csv(rows, std::cout);
    int unreached = 0;
    for (const auto& r : rows)
        if (!r.ok()) ++unreached;
    std::cerr << "sweep: " << rows.size() << " cells, " << unreached << " without a ratio\n";
    return kExitOk;
}

int cmd_certify(const CliOptions& o) {
    const RunConfig rc = build_run_config(o);
    const BenchmarkProblem prob = make_problem(rc.problem, rc.problem_overrides);
    const double delta = o.cert_delta > 0 ? o.cert_delta : prob.delta;

    // empirical delta_bar_a: largest ladder delta with a clean certificate
    const double ladder[] = {1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1, 2e-1, 5e-1, 1.0};
    StabilityBounds B0 = compute_bounds(prob, delta);
    double delta_bar_a = 0.0;
    for (double d : ladder) {
        const auto cert = verify_decay_backup(prob.clf, prob.model, prob.cert_x_grid,
                                              prob.cert_theta_hat_grid, d, prob.index_I,
                                              B0.r_star);
        if (cert.empty())
            delta_bar_a = d;
        else
            break;
    }
    const StabilityBounds B = compute_bounds(
        prob, delta,
        delta_bar_a > 0 ? delta_bar_a : std::numeric_limits<double>::infinity());

    const auto cert = verify_decay_backup(prob.clf, prob.model, prob.cert_x_grid,
                                          prob.cert_theta_hat_grid, delta, prob.index_I,
                                          B.r_star);
    std::ostream* os = &std::cout;
    std::ofstream f;
    if (!rc.output.empty()) {
        f.open(rc.output);
        if (!f) throw std::ios_base::failure("cannot open for writing: " + rc.output);
        os = &f;
    }
    write_bounds_report(B, *os);
    *os << "delta_bar_a = " << delta_bar_a << '\n';
    *os << "certificate_delta = " << delta << '\n';
    *os << "certificate_points = " << cert.points_checked << '\n';
    *os << "certificate_skipped_core = " << cert.points_skipped_core << '\n';
    *os << "certificate_violations = " << cert.violations.size() << '\n';
    for (size_t i = 0; i < cert.violations.size() && i < 20; ++i) {
        const auto& v = cert.violations[i];
        *os << "violation_" << i << " = x(";
        for (int j = 0; j < v.x.size(); ++j) *os << (j ? " " : "") << v.x(j);
        *os << ") dVc " << v.delta_vc << " required " << v.required << '\n';
    }
    return cert.empty() ? kExitOk : kExitStability;
}

int cmd_compare(const CliOptions& o) {
    const RunConfig rc = build_run_config(o);
    const BenchmarkProblem prob = make_problem(rc.problem, rc.problem_overrides);
    LoopConfig lc = loop_config_from(rc, prob);
    const Vec x0 = rc.x0.value_or(prob.x0_default);

    lc.controller = ControllerKind::Learned;
    const TrajectoryLog L = run(prob, lc, x0);
    lc.controller = ControllerKind::Backup;
    const TrajectoryLog Bk = run(prob, lc, x0);
    const auto c = cost_ratio(L, Bk);
    std::cout << "K_u = " << (L.reached ? L.reach_step : -1) << '\n';
    std::cout << "K_mu = " << (Bk.reached ? Bk.reach_step : -1) << '\n';
    std::cout << "fallbacks = " << L.fallback_count << '\n';
    if (c)
        std::cout << "C_pct = " << *c << '\n';
    else
        std::cout << "C_pct = unreached\n";
    if (!rc.output.empty()) emit_csv(L, rc.output);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stabilrl: learning controller with a Lyapunov supervisor"};
    app.require_subcommand(1);

    CliOptions o;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config_path, "flat key = value config file");
        cmd->add_option("--problem", o.problem, "traction | cruise");
        cmd->add_option("--x0", o.x0, "initial state");
        cmd->add_option("--horizon", o.horizon, "steps");
        cmd->add_option("--delta", o.delta, "sampling period");
        cmd->add_option("--update-mode", o.update_mode, "lsq | gd");
        cmd->add_option("--actor-mode", o.actor_mode, "optimize | policy_gradient");
        cmd->add_option("--samples", o.sample_buffer, "lsq sample buffer size M");
        cmd->add_option("--output", o.output, "output path (default stdout)");
        cmd->add_option("--set", o.overrides,
                        "problem parameter override key=value, e.g. traction.k=40");
    };

    CLI::App* c_run = app.add_subcommand("run", "single closed-loop run, CSV trajectory");
    add_common(c_run);
    CLI::App* c_sweep = app.add_subcommand("sweep", "grid of initial states, cost-ratio table");
    add_common(c_sweep);
    c_sweep->add_option("--min", o.sweep_min, "per-coordinate lower bounds")->required();
    c_sweep->add_option("--max", o.sweep_max, "per-coordinate upper bounds")->required();
    c_sweep->add_option("--res", o.sweep_res, "per-coordinate resolutions")->required();
    c_sweep->add_flag("--no-parallel", o.no_parallel, "run cells sequentially");
    CLI::App* c_cert = app.add_subcommand("certify", "backup decay certificate + bounds report");
    add_common(c_cert);
    c_cert->add_option("--cert-delta", o.cert_delta, "certificate sampling period");
    CLI::App* c_cmp = app.add_subcommand("compare", "learned vs backup from one x0, prints C_%");
    add_common(c_cmp);

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* active = app.get_subcommands().front();
        std::string cfg_path = o.config_path;
        if (cfg_path.empty()) {
            if (const char* env = std::getenv("STABILRL_CONFIG")) cfg_path = env;
        }
        if (!cfg_path.empty()) apply_config_file(cfg_path, o, *active);

        if (active == c_run) return cmd_run(o);
        if (active == c_sweep) return cmd_sweep(o);
        if (active == c_cert) return cmd_certify(o);
        if (active == c_cmp) return cmd_compare(o);
        return kExitConfig;
    } catch (const StabilityViolation& e) {
        std::cerr << "stability violation: " << e.what() << '\n';
        return kExitStability;
    } catch (const IntegrationBlowup& e) {
        std::cerr << "integration blowup: " << e.what() << '\n';
        return kExitStability;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}
