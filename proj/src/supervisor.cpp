#include "stabilrl/supervisor.hpp"

#include "stabilrl/problems.hpp"

#include <cmath>

namespace stabilrl {

namespace {

// Deterministic grid over the overshoot region: the index-set deviation runs
// over [-R*, R*] per targeted axis, the remaining coordinates over the
// problem's estimation interval.
std::vector<Vec> estimation_grid(const BenchmarkProblem& prob, double R_star, int res_dev,
                                 int res_free) {
    const int n = prob.model.n;
    std::vector<int> free_axes;
    std::vector<bool> targeted(n, false);
    for (int i : prob.index_I.indices) targeted[i] = true;
    for (int i = 0; i < n; ++i)
        if (!targeted[i]) free_axes.push_back(i);

    std::vector<Vec> grid;
    std::vector<int> counter(n, 0);
    std::vector<int> sizes(n, 1);
    for (int i : prob.index_I.indices) sizes[i] = res_dev;
    for (size_t j = 0; j < free_axes.size(); ++j) sizes[free_axes[j]] = res_free;

    int total = 1;
    for (int s : sizes) total *= s;
    grid.reserve(total);
    for (int it = 0; it < total; ++it) {
        Vec x(n);
        int rem = it;
        for (int i = 0; i < n; ++i) {
            const int idx = rem % sizes[i];
            rem /= sizes[i];
            if (targeted[i]) {
                const double t = (sizes[i] == 1) ? 0.5 : double(idx) / (sizes[i] - 1);
                x(i) = prob.index_I.target(i) - R_star + 2.0 * R_star * t;
            } else {
                int fpos = 0;
                for (size_t j = 0; j < free_axes.size(); ++j)
                    if (free_axes[j] == i) fpos = static_cast<int>(j);
                const double lo = prob.est_lo(fpos), hi = prob.est_hi(fpos);
                const double t = (sizes[i] == 1) ? 0.5 : double(idx) / (sizes[i] - 1);
                x(i) = lo + (hi - lo) * t;
            }
        }
        grid.push_back(std::move(x));
    }
    return grid;
}

std::vector<Vec> box_corners(const Vec& lo, const Vec& hi) {
    const int d = static_cast<int>(lo.size());
    std::vector<Vec> out;
    out.reserve(1 << d);
    for (int mask = 0; mask < (1 << d); ++mask) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v(i) = (mask >> i & 1) ? hi(i) : lo(i);
        out.push_back(std::move(v));
    }
    return out;
}

double spectral_norm(const Mat& A) {
    if (A.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues()(0);
}

Vec tau_critic(const BenchmarkProblem& prob, const Vec& x, const Vec& w) {
    return prob.model.F(x).transpose() * critic_grad_x(prob.reg, w, x);
}

double theta_error_term(const BenchmarkProblem& prob, const Vec& theta_hat) {
    const Vec tilde = prob.model.theta_true - theta_hat;
    return 0.5 * tilde.dot(prob.clf.Gamma.ldlt().solve(tilde));
}

} // namespace

StabilityBounds compute_bounds(const BenchmarkProblem& prob, double delta_requested,
                               double delta_bar_a) {
    StabilityBounds B;
    B.R = prob.R;
    B.r = prob.r;
    B.delta_used = delta_requested;
    B.grid_resolution = 201;
    B.safety_factor = 1.2;

    B.v_star = prob.clf.q1(prob.r);
    B.r_star = prob.clf.q2_inv(0.5 * B.v_star);

    const int res_free = 13;

    // J_bar over B_R x W first; it sizes the overshoot ball.
    {
        auto grid_R = estimation_grid(prob, prob.R, B.grid_resolution, res_free);
        double max_phi_norm = 0.0;
        for (const Vec& x : grid_R) max_phi_norm = std::max(max_phi_norm, prob.reg.phi(x).norm());
        B.J_bar = prob.wset.w_upper * max_phi_norm;
    }
    B.R_star = prob.R_star_factor * std::max(prob.clf.q1_inv(B.J_bar), prob.R);

    auto grid = estimation_grid(prob, B.R_star, B.grid_resolution, res_free);
    const auto u_corners = box_corners(prob.box.lower, prob.box.upper);
    const auto th_corners = box_corners(prob.theta_lo, prob.theta_hi);

    double F_bar = 0, tau_bar = 0, phi_bar = 0, phi1 = 0, phi2 = 0, L_F = 0, L_phi = 0;
    const double wbar = prob.wset.w_upper;
    for (const Vec& x : grid) {
        const Vec phix = prob.reg.phi(x);
        const Mat gphi = prob.reg.grad_phi(x);
        phi_bar = std::max(phi_bar, phix.norm());
        phi1 = std::max(phi1, wbar * spectral_norm(gphi));
        double hsum = 0.0;
        for (const Mat& H : prob.reg.hess_phi(x)) {
            const double hn = spectral_norm(H);
            hsum += hn * hn;
        }
        phi2 = std::max(phi2, wbar * std::sqrt(hsum));
        L_phi = std::max(L_phi, spectral_norm(gphi));
        tau_bar = std::max(tau_bar, wbar * spectral_norm(prob.model.F(x).transpose() *
                                                         gphi.transpose()));

        // dynamics sup and Lipschitz constant; Fcal is affine in (u, theta),
        // so corners of both boxes suffice
        const double h = 1e-5 * (1.0 + x.norm());
        for (const Vec& uc : u_corners) {
            for (const Vec& tc : th_corners) {
                F_bar = std::max(F_bar, eval_dynamics(prob.model, x, uc, tc).norm());
                Mat Jx(prob.model.n, prob.model.n);
                for (int i = 0; i < prob.model.n; ++i) {
                    Vec xp = x, xm = x;
                    xp(i) += h;
                    xm(i) -= h;
                    Jx.col(i) = (eval_dynamics(prob.model, xp, uc, tc) -
                                 eval_dynamics(prob.model, xm, uc, tc)) /
                                (2.0 * h);
                }
                L_F = std::max(L_F, spectral_norm(Jx));
            }
        }
    }
    const double sf = B.safety_factor;
    B.F_bar = sf * F_bar;
    B.tau_bar = sf * tau_bar;
    B.phi_bar = sf * phi_bar;
    B.phi_bar_1 = sf * phi1;
    B.phi_bar_2 = sf * phi2;
    B.L_F = sf * L_F;
    B.L_phi = prob.overrides.L_phi.value_or(sf * L_phi);
    if (prob.overrides.F_bar) B.F_bar = *prob.overrides.F_bar;
    if (prob.overrides.tau_bar) B.tau_bar = *prob.overrides.tau_bar;
    if (prob.overrides.phi_bar) B.phi_bar = *prob.overrides.phi_bar;
    if (prob.overrides.phi_bar_1) B.phi_bar_1 = *prob.overrides.phi_bar_1;
    if (prob.overrides.phi_bar_2) B.phi_bar_2 = *prob.overrides.phi_bar_2;
    if (prob.overrides.L_F) B.L_F = *prob.overrides.L_F;

    // minimum decay rate on the annulus
    {
        double nu_min = std::numeric_limits<double>::infinity();
        const int res = B.grid_resolution;
        for (int i = 0; i < res; ++i) {
            const double rho = B.r_star + (B.R_star - B.r_star) * double(i) / (res - 1);
            nu_min = std::min(nu_min, 0.5 * prob.clf.alpha_nu(rho));
        }
        B.nu_bar = nu_min;
    }

    B.Delta_bar = B.phi_bar_1 * B.L_F * B.F_bar +
                  0.5 * B.tau_bar * B.tau_bar * spectral_norm(prob.clf.Gamma) +
                  0.5 * B.F_bar * B.F_bar * B.phi_bar_2;

    const double denom = prob.wset.w_upper * B.L_phi * B.F_bar;
    const double c1 = 0.25 * B.v_star / denom;
    const double headroom = prob.clf.q1(B.R_star) - B.J_bar;
    if (headroom <= 0.0)
        throw ConfigError("compute_bounds: overshoot constraint infeasible, "
                          "J_bar + w_upper*L_phi*delta*F_bar <= q1(R*) admits no delta > 0");
    const double c2 = headroom / denom;
    const double c3 = B.nu_bar / (10.0 * B.Delta_bar);
    B.delta_bar = std::min(std::min(c1, c2), std::min(c3, delta_bar_a));
    if (B.delta_bar <= 0.0)
        throw ConfigError("compute_bounds: no positive sampling period satisfies the "
                          "delta constraints");

    B.eps1_bar = 0.4 * B.nu_bar * delta_requested;
    B.epsw_bar = 0.4 * B.nu_bar * delta_requested / B.phi_bar;
    B.delta_admissible = delta_requested <= B.delta_bar;
    return B;
}

LearningConditions check_conditions(const BenchmarkProblem& prob, const StabilityBounds& bounds,
                                    const Vec& x, const Vec& u, const Vec& w, const Vec& w_prev,
                                    const Vec& theta_hat, double delta) {
    LearningConditions c;
    const double lhs =
        critic_grad_x(prob.reg, w, x).dot(delta * eval_dynamics(prob.model, x, u, theta_hat));
    c.decay = lhs <= -0.5 * delta * prob.clf.nu(x, theta_hat) + bounds.eps1_bar;
    c.wstep = (w - w_prev).norm() <= bounds.epsw_bar;
    c.wprime = prob.wset.prime_predicate(w);
    return c;
}

LoopState make_loop_state(const BenchmarkProblem& prob, const LoopConfig& cfg_in, const Vec& x0) {
    LoopState S;
    S.prob = &prob;
    S.cfg = cfg_in;
    if (S.cfg.delta <= 0.0) S.cfg.delta = prob.delta;
    if (S.cfg.horizon <= 0) S.cfg.horizon = prob.horizon_default;
    S.bounds = compute_bounds(prob, S.cfg.delta);

    if (x0.size() != prob.model.n) throw ConfigError("run: x0 dimension mismatch");
    if (prob.index_I.deviation_norm(x0) > prob.R + 1e-12)
        throw ConfigError("run: x0 outside the start ball B_R");
    const double w0n = prob.w0.norm();
    if (w0n < prob.wset.w_lower - 1e-12 || w0n > prob.wset.w_upper + 1e-12)
        throw ConfigError("run: w0 outside the weight set");

    S.x = x0;
    S.w = prob.w0;
    S.theta_hat = prob.theta_hat0;
    S.u_prev = prob.clf.mu(x0, prob.theta_hat0);
    S.policy.varsigma = Vec::Zero(2 * prob.model.m);
    S.policy.learning_rate = S.cfg.l_varsigma;
    S.k = 0;
    return S;
}

namespace {

// Affine policy in the first targeted coordinate's deviation, one pair of
// parameters per input channel.
Vec policy_eval(const BenchmarkProblem& prob, const Vec& varsigma, const Vec& x) {
    const int m = prob.model.m;
    const int i0 = prob.index_I.indices.front();
    const double dev = x(i0) - prob.index_I.target(i0);
    Vec u(m);
    for (int i = 0; i < m; ++i) u(i) = varsigma(2 * i) + varsigma(2 * i + 1) * dev;
    return u;
}

} // namespace

StepRecord step(LoopState& S, std::vector<Vec>* intra) {
    const BenchmarkProblem& P = *S.prob;
    const double delta = S.cfg.delta;
    const Vec x = S.x;
    const Vec theta_hat = S.theta_hat;

    StepRecord rec;
    rec.k = S.k;
    rec.x = x;
    rec.theta_hat = theta_hat;
    rec.in_core = P.index_I.deviation_norm(x) <= S.bounds.r_star;

    Vec u, w;
    if (S.cfg.controller == ControllerKind::Backup) {
        u = P.clf.mu(x, theta_hat);
        w = P.wset.w_sharp;
    } else if (rec.in_core) {
        // inside the core ball the backup pair is always employed
        u = P.clf.mu(x, theta_hat);
        w = P.wset.w_sharp;
    } else {
        Vec w_cand;
        if (S.cfg.update_mode == UpdateMode::Lsq) {
            S.sample_buffer.push_back(x);
            while (static_cast<int>(S.sample_buffer.size()) > S.cfg.sample_buffer)
                S.sample_buffer.erase(S.sample_buffer.begin());
            auto policy = [&](const Vec& xs) { return P.clf.mu(xs, theta_hat); };
            w_cand = lsq_update(P.reg, P.model, P.stage_cost, S.sample_buffer, policy, S.w,
                                theta_hat, delta, P.wset)
                         .w;
        } else {
            CriticState cs{S.w, S.w, P.l_w};
            w_cand = gd_update(P.reg, P.model, P.stage_cost, x, S.u_prev, cs, theta_hat, delta,
                               P.wset);
        }

        Vec u_cand;
        if (S.cfg.actor_mode == ActorMode::Optimize) {
            u_cand = solve_actor(P.reg, P.model, P.stage_cost, x, w_cand, theta_hat, delta,
                                 P.box, P.clf.mu(x, theta_hat), S.cfg.actor)
                         .u;
        } else {
            auto pol = [&P](const Vec& vs, const Vec& xs) { return policy_eval(P, vs, xs); };
            const Vec grad = policy_objective_gradient(P.reg, P.model, P.stage_cost, x, w_cand,
                                                       theta_hat, delta, pol, S.policy.varsigma);
            S.policy = policy_gradient_step(S.policy, grad);
            u_cand = P.box.clip(policy_eval(P, S.policy.varsigma, x));
        }

        const LearningConditions c =
            check_conditions(P, S.bounds, x, u_cand, w_cand, S.w, theta_hat, delta);
        rec.cond_decay = c.decay;
        rec.cond_wstep = c.wstep;
        rec.cond_wprime = c.wprime;
        if (c.all()) {
            u = u_cand;
            w = w_cand;
        } else {
            u = P.clf.mu(x, theta_hat);
            w = P.wset.w_sharp;
            rec.fallback = true;
        }
    }

    rec.u = u;
    rec.w = w;
    rec.stage_cost_value = P.stage_cost(x, u);
    const double terr = theta_error_term(P, theta_hat);
    rec.V_c_value = P.clf.V(x) + terr;
    rec.calV_c_value = critic_eval(P.reg, w, x) + terr;

    // discrete estimator update with the weight actually employed
    const Vec theta_next = theta_hat + delta * (P.clf.Gamma * tau_critic(P, x, w));

    ShConfig sh{delta, S.cfg.substeps};
    ShStep st = integrate_sh(P.model, x, u, P.model.theta_true, sh);

    auto guard = [&](const Vec& xs) {
        if (P.index_I.deviation_norm(xs) > S.bounds.R_star)
            throw StabilityViolation(P.name + ": state left the overshoot ball at step " +
                                     std::to_string(S.k));
        if (P.iss_cap > 0.0) {
            for (int i = 0; i < P.model.n; ++i) {
                bool targeted = false;
                for (int j : P.index_I.indices) targeted |= (j == i);
                if (!targeted && std::abs(xs(i)) > P.iss_cap)
                    throw StabilityViolation(P.name + ": unbounded coordinate exceeded cap at step " +
                                             std::to_string(S.k));
            }
        }
    };
    for (const Vec& xs : st.intra) guard(xs);
    if (intra)
        for (const Vec& xs : st.intra) intra->push_back(xs);

    S.x = st.x_next;
    S.theta_hat = theta_next;
    S.u_prev = u;
    S.w = w;
    ++S.k;
    return rec;
}

TrajectoryLog run(const BenchmarkProblem& prob, const LoopConfig& cfg, const Vec& x0) {
    LoopState S = make_loop_state(prob, cfg, x0);
    TrajectoryLog log;
    log.delta = S.cfg.delta;
    log.steps.reserve(S.cfg.horizon);
    for (int k = 0; k < S.cfg.horizon; ++k) {
        log.steps.push_back(step(S, &log.intra_samples));
        if (log.steps.back().fallback) ++log.fallback_count;
        if (log.steps.back().in_core) ++log.core_count;
    }
    int last_out = -1;
    for (int k = 0; k < static_cast<int>(log.steps.size()); ++k)
        if (prob.index_I.deviation_norm(log.steps[k].x) > prob.r) last_out = k;
    if (last_out + 1 < static_cast<int>(log.steps.size())) {
        log.reach_step = last_out + 1;
        log.reached = true;
    }
    return log;
}

} // namespace stabilrl
