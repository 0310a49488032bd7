#pragma once

#include "stabilrl/actor.hpp"
#include "stabilrl/problems_fwd.hpp"

#include <optional>

namespace stabilrl {

// Every constant the stability analysis needs, estimated once per (problem,
// delta) pair. Suprema are taken over the overshoot region by deterministic
// grid sampling with a safety factor; closed-form per-problem overrides take
// precedence where available.
struct StabilityBounds {
    double R = 0;        // start ball radius (index-set deviation)
    double r = 0;        // target ball radius
    double R_star = 0;   // overshoot ball radius
    double r_star = 0;   // core ball radius q2^{-1}(v*/2)
    double v_star = 0;   // level value q1(r)
    double J_bar = 0;    // max Jhat over B_R x W
    double F_bar = 0;    // sup ||Fcal|| over B_R* x U x Theta
    double tau_bar = 0;  // sup ||tau(x,w)||
    double phi_bar = 0;  // sup ||phi||
    double phi_bar_1 = 0; // sup ||grad_x Jhat||
    double phi_bar_2 = 0; // sup ||hess_x Jhat||
    double L_F = 0;      // dynamics Lipschitz constant on B_R*
    double L_phi = 0;    // regressor Lipschitz constant on B_R*
    double nu_bar = 0;   // minimum decay rate on the annulus [r*, R*]
    double Delta_bar = 0; // phi1*L_F*F_bar + tau^2*||Gamma||/2 + F_bar^2*phi2/2
    double delta_bar = 0; // admissible sampling period
    double eps1_bar = 0;  // (2 nu_bar / 5) delta
    double epsw_bar = 0;  // (2 nu_bar / 5) delta / phi_bar
    double delta_used = 0;
    bool delta_admissible = false; // delta_used <= delta_bar (warning only)
    int grid_resolution = 0;       // points per index-set axis used for the sups
    double safety_factor = 0.0;
};

struct LearningConditions {
    bool decay = false;
    bool wstep = false;
    bool wprime = false;
    bool all() const { return decay && wstep && wprime; }
};

struct StepRecord {
    int k = 0;
    Vec x;
    Vec u;
    Vec w;
    Vec theta_hat;
    bool cond_decay = true;
    bool cond_wstep = true;
    bool cond_wprime = true;
    bool fallback = false; // condition failure switched to (mu, w#)
    bool in_core = false;  // core-ball rule forced (mu, w#)
    double stage_cost_value = 0;
    double V_c_value = 0;    // V(x) + parameter-error term (diagnostic)
    double calV_c_value = 0; // Jhat(x,w) + parameter-error term (diagnostic)
};

enum class UpdateMode { Lsq, Gd };
enum class ActorMode { Optimize, PolicyGradient };
enum class ControllerKind { Learned, Backup };

struct TrajectoryLog {
    std::vector<StepRecord> steps;
    std::vector<Vec> intra_samples; // substep states between records
    double delta = 0;
    int reach_step = -1; // first K with x_I in B_r from K to the horizon
    bool reached = false;
    int fallback_count = 0;
    int core_count = 0;
};

struct LoopConfig {
    double delta = 0.0;       // 0: use problem default
    int substeps = 10;
    int horizon = 0;          // 0: use problem default
    UpdateMode update_mode = UpdateMode::Lsq;
    ActorMode actor_mode = ActorMode::Optimize;
    ControllerKind controller = ControllerKind::Learned;
    int sample_buffer = 1;    // M, ring buffer of recent states for lsq
    ActorConfig actor;
    double l_varsigma = 0.1;  // learning rate of the policy-gradient route
};

// Appendix constant pipeline. Throws ConfigError when no positive sampling
// period satisfies the defining constraints (names the binding one).
StabilityBounds compute_bounds(const BenchmarkProblem& prob, double delta_requested,
                               double delta_bar_a = std::numeric_limits<double>::infinity());

// Algorithm conditions i)-iii) for a candidate pair at the current state.
LearningConditions check_conditions(const BenchmarkProblem& prob, const StabilityBounds& bounds,
                                    const Vec& x, const Vec& u, const Vec& w, const Vec& w_prev,
                                    const Vec& theta_hat, double delta);

// Mutable per-run state of the control loop.
struct LoopState {
    const BenchmarkProblem* prob = nullptr;
    StabilityBounds bounds;
    LoopConfig cfg;
    Vec x;
    Vec w;       // final weight of the previous step
    Vec theta_hat;
    Vec u_prev;  // last applied input
    PolicyParams policy; // for the policy-gradient actor route
    std::vector<Vec> sample_buffer;
    int k = 0;
};

LoopState make_loop_state(const BenchmarkProblem& prob, const LoopConfig& cfg, const Vec& x0);

// One pass of the outer loop: critic update, actor, condition check with
// backup fallback, estimator update, and one sample-and-hold integration of
// the true plant. Intra-sample states are appended to `intra`.
StepRecord step(LoopState& state, std::vector<Vec>* intra = nullptr);

// Full closed-loop run from x0 in B_R.
TrajectoryLog run(const BenchmarkProblem& prob, const LoopConfig& cfg, const Vec& x0);

} // namespace stabilrl
