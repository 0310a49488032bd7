#include "stabilrl/runner.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

namespace stabilrl {

void SweepSpec::validate(int n) const {
    if (static_cast<int>(ranges.size()) != n || static_cast<int>(resolution.size()) != n)
        throw ConfigError("SweepSpec: one range and resolution per state coordinate");
    for (int i = 0; i < n; ++i) {
        if (resolution[i] < 1) throw ConfigError("SweepSpec: resolution must be >= 1");
        if (resolution[i] >= 2 && ranges[i].first > ranges[i].second)
            throw ConfigError("SweepSpec: empty range on a swept axis");
        if (resolution[i] == 1 && ranges[i].first != ranges[i].second)
            throw ConfigError("SweepSpec: fixed axis needs equal endpoints or resolution >= 2");
    }
}

std::optional<double> cost_ratio(const TrajectoryLog& learned, const TrajectoryLog& backup) {
    if (!learned.reached || !backup.reached) return std::nullopt;
    auto acc = [](const TrajectoryLog& log, int K) {
        double s = 0.0;
        for (int k = 0; k <= K && k < static_cast<int>(log.steps.size()); ++k)
            s += log.steps[k].stage_cost_value;
        return s;
    };
    const double num = acc(learned, learned.reach_step);
    const double den = acc(backup, backup.reach_step);
    if (den <= 0.0) return std::nullopt;
    return num / den;
}

std::vector<SweepRow> sweep(const BenchmarkProblem& prob, const SweepSpec& spec,
                            const LoopConfig& cfg, bool parallel) {
    spec.validate(prob.model.n);

    std::vector<Vec> cells;
    std::vector<int> sizes = spec.resolution;
    int total = 1;
    for (int s : sizes) total *= s;
    cells.reserve(total);
    for (int it = 0; it < total; ++it) {
        Vec x0(prob.model.n);
        int rem = it;
        for (int i = 0; i < prob.model.n; ++i) {
            const int idx = rem % sizes[i];
            rem /= sizes[i];
            const auto [lo, hi] = spec.ranges[i];
            x0(i) = (sizes[i] == 1) ? lo : lo + (hi - lo) * double(idx) / (sizes[i] - 1);
        }
        cells.push_back(std::move(x0));
    }

    std::vector<SweepRow> rows(cells.size());
    auto run_cell = [&](size_t i) {
        SweepRow row;
        row.x0 = cells[i];
        try {
            LoopConfig lc = cfg;
            lc.controller = ControllerKind::Learned;
            const TrajectoryLog L = run(prob, lc, cells[i]);
            lc.controller = ControllerKind::Backup;
            const TrajectoryLog Bk = run(prob, lc, cells[i]);
            row.fallback_count = L.fallback_count;
            row.K_u = L.reached ? L.reach_step : -1;
            row.K_mu = Bk.reached ? Bk.reach_step : -1;
            const auto c = cost_ratio(L, Bk);
            if (c)
                row.c_pct = *c;
            else
                row.error = "unreached";
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows[i] = std::move(row);
    };

    if (parallel && cells.size() > 1) {
        const unsigned workers =
            std::max(1u, std::min(std::thread::hardware_concurrency(),
                                  static_cast<unsigned>(cells.size())));
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&]() {
                for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
                    run_cell(i);
            });
        for (auto& th : pool) th.join();
    } else {
        for (size_t i = 0; i < cells.size(); ++i) run_cell(i);
    }
    return rows;
}

namespace {

void put(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

void put_vec(std::ostream& os, const Vec& v) {
    for (int i = 0; i < v.size(); ++i) {
        os << ',';
        put(os, v(i));
    }
}

} // namespace

void emit_csv(const TrajectoryLog& log, std::ostream& os) {
    int n = 0, m = 0, l = 0, p = 0;
    if (!log.steps.empty()) {
        n = static_cast<int>(log.steps[0].x.size());
        m = static_cast<int>(log.steps[0].u.size());
        l = static_cast<int>(log.steps[0].w.size());
        p = static_cast<int>(log.steps[0].theta_hat.size());
    }
    os << "k,t";
    for (int i = 0; i < n; ++i) os << ",x" << i;
    for (int i = 0; i < m; ++i) os << ",u" << i;
    for (int i = 0; i < l; ++i) os << ",w" << i;
    for (int i = 0; i < p; ++i) os << ",theta_hat" << i;
    os << ",cond_decay,cond_wstep,cond_wprime,fallback,in_core,stage_cost,V_c,calV_c\n";
    for (const StepRecord& s : log.steps) {
        os << s.k << ',';
        put(os, s.k * log.delta);
        put_vec(os, s.x);
        put_vec(os, s.u);
        put_vec(os, s.w);
        put_vec(os, s.theta_hat);
        os << ',' << int(s.cond_decay) << ',' << int(s.cond_wstep) << ',' << int(s.cond_wprime)
           << ',' << int(s.fallback) << ',' << int(s.in_core) << ',';
        put(os, s.stage_cost_value);
        os << ',';
        put(os, s.V_c_value);
        os << ',';
        put(os, s.calV_c_value);
        os << '\n';
    }
}

void emit_csv(const TrajectoryLog& log, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::ios_base::failure("cannot open for writing: " + path);
    emit_csv(log, f);
    if (!f.good()) throw std::ios_base::failure("write failed: " + path);
}

void emit_csv(const std::vector<SweepRow>& table, std::ostream& os) {
    const int n = table.empty() ? 0 : static_cast<int>(table[0].x0.size());
    for (int i = 0; i < n; ++i) os << "x0_" << i << ',';
    os << "c_pct,K_u,K_mu,fallback_count,error\n";
    for (const SweepRow& r : table) {
        for (int i = 0; i < n; ++i) {
            put(os, r.x0(i));
            os << ',';
        }
        if (r.ok())
            put(os, r.c_pct);
        else
            os << "nan";
        os << ',' << r.K_u << ',' << r.K_mu << ',' << r.fallback_count << ',' << r.error << '\n';
    }
}

void emit_csv(const std::vector<SweepRow>& table, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::ios_base::failure("cannot open for writing: " + path);
    emit_csv(table, f);
    if (!f.good()) throw std::ios_base::failure("write failed: " + path);
}

TrajectoryLog parse_trajectory_csv(std::istream& is) {
    TrajectoryLog log;
    std::string line;
    if (!std::getline(is, line)) return log;

    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) header.push_back(tok);
    }
    auto count_prefix = [&](const std::string& pre) {
        int c = 0;
        for (const auto& h : header)
            if (h.rfind(pre, 0) == 0 && h.size() > pre.size() &&
                std::isdigit(static_cast<unsigned char>(h[pre.size()])))
                ++c;
        return c;
    };
    const int n = count_prefix("x");
    const int m = count_prefix("u");
    const int l = count_prefix("w");
    const int p = count_prefix("theta_hat");

    bool have_delta = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        auto next = [&]() {
            if (!std::getline(ss, tok, ',')) throw std::ios_base::failure("short CSV row");
            return tok;
        };
        StepRecord s;
        s.k = std::stoi(next());
        const double t = std::stod(next());
        if (!have_delta && s.k > 0) {
            log.delta = t / s.k;
            have_delta = true;
        }
        auto read_vec = [&](int d) {
            Vec v(d);
            for (int i = 0; i < d; ++i) v(i) = std::stod(next());
            return v;
        };
        s.x = read_vec(n);
        s.u = read_vec(m);
        s.w = read_vec(l);
        s.theta_hat = read_vec(p);
        s.cond_decay = std::stoi(next()) != 0;
        s.cond_wstep = std::stoi(next()) != 0;
        s.cond_wprime = std::stoi(next()) != 0;
        s.fallback = std::stoi(next()) != 0;
        s.in_core = std::stoi(next()) != 0;
        s.stage_cost_value = std::stod(next());
        s.V_c_value = std::stod(next());
        s.calV_c_value = std::stod(next());
        log.steps.push_back(std::move(s));
    }
    return log;
}

void write_bounds_report(const StabilityBounds& B, std::ostream& os) {
    auto row = [&](const char* k, double v) {
        os << k << " = ";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        os << buf << '\n';
    };
    row("R", B.R);
    row("r", B.r);
    row("R_star", B.R_star);
    row("r_star", B.r_star);
    row("v_star", B.v_star);
    row("J_bar", B.J_bar);
    row("F_bar", B.F_bar);
    row("tau_bar", B.tau_bar);
    row("phi_bar", B.phi_bar);
    row("phi_bar_1", B.phi_bar_1);
    row("phi_bar_2", B.phi_bar_2);
    row("L_F", B.L_F);
    row("L_phi", B.L_phi);
    row("nu_bar", B.nu_bar);
    row("Delta_bar", B.Delta_bar);
    row("delta_bar", B.delta_bar);
    row("eps1_bar", B.eps1_bar);
    row("epsw_bar", B.epsw_bar);
    row("delta_used", B.delta_used);
    os << "delta_admissible = " << (B.delta_admissible ? "yes" : "no") << '\n';
    os << "grid_resolution = " << B.grid_resolution << '\n';
    row("safety_factor", B.safety_factor);
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        kv[key] = val;
    }
    return kv;
}

LoopConfig loop_config_from(const RunConfig& rc, const BenchmarkProblem& prob) {
    LoopConfig lc;
    lc.delta = rc.delta > 0 ? rc.delta : prob.delta;
    lc.horizon = rc.horizon > 0 ? rc.horizon : prob.horizon_default;
    lc.update_mode = rc.update_mode_set ? rc.update_mode : prob.update_default;
    lc.actor_mode = rc.actor_mode;
    lc.sample_buffer = rc.sample_buffer;
    return lc;
}

} // namespace stabilrl
