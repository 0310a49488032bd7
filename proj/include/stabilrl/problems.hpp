#pragma once

#include "stabilrl/aclf.hpp"
#include "stabilrl/actor.hpp"
#include "stabilrl/critic.hpp"
#include "stabilrl/supervisor.hpp"

namespace stabilrl {

// Optional closed-form replacements for grid-estimated constants.
struct BoundOverrides {
    std::optional<double> F_bar, tau_bar, phi_bar, phi_bar_1, phi_bar_2, L_F, L_phi;
};

// A fully wired benchmark: plant, Lyapunov apparatus, critic basis, weight
// sets, admissible box, stage cost, targeted index set and the run defaults.
struct BenchmarkProblem {
    std::string name;
    SystemModel model;
    AdaptiveClf clf;
    Regressor reg;
    WeightSet wset;
    ControlBox box;
    StageCost stage_cost;
    IndexSet index_I;

    double R = 0;   // start ball radius, index-set deviation
    double r = 0;   // target ball radius
    Vec theta_lo, theta_hi; // compact membership box Theta

    // defaults
    double delta = 0.01;
    Vec theta_hat0;
    Vec w0;
    double l_w = 0.0;
    Vec x0_default;
    int horizon_default = 0;
    UpdateMode update_default = UpdateMode::Lsq;

    // estimation region for grid suprema: deviation grid on the index set is
    // [-R*, R*]; the remaining coordinates range over [est_lo, est_hi].
    Vec est_lo, est_hi;
    double iss_cap = 0.0;    // bound on non-targeted coordinates during runs
    double R_star_factor = 1.1;

    BoundOverrides overrides;

    // certification grid for the backup decay check
    std::vector<Vec> cert_x_grid;
    std::vector<Vec> cert_theta_hat_grid;
};

// Car traction control. State x = [v, s] (speed, slip ratio); the input is a
// drive torque acting on the slip channel; only the slip is driven to the
// reference, the speed stays bounded. theta = [rho, c3, M, tau_f].
struct TractionParams {
    double m = 400.0;   // vehicle mass
    double g = 9.81;
    double J = 10.0;    // wheel inertia
    double r_w = 0.3;   // wheel radius
    double a1 = 0.01;   // slip drift gain
    double a2 = 100.0;  // input gain
    double a3 = 1.0;    // braking-torque coupling
    double c1 = 1.2801; // dry-asphalt friction shape
    double c2 = 23.99;
    double c3 = 0.52;
    double tau_f_true = 12.9; // braking torque
    double M_true = 0.0;      // slip-damping surrogate, zero in the plant
    double k = 40.0;          // backup controller gain
    double gamma = 0.1;       // adaptation gain (Gamma = gamma * I)
    double s_star = 0.2;
    double r = 0.03;
    double R = 0.3;
    double w_lower = 0.4, w_upper = 40.0;
    double u_min = -80.0, u_max = 80.0;
    double delta = 0.01;
    double q_slip = 5.0, r_input = 0.1; // stage cost weights
    double v_est_min = 55.0, v_est_max = 260.0; // speed range for grid suprema
    double iss_cap = 400.0;
    // hook for a Lipschitz friction perturbation; identically zero by default
    std::function<double(double)> delta_lambda;
};

BenchmarkProblem traction_problem(const TractionParams& params = {});

// Adaptive cruise control. Scalar state v; theta = [f0, f1, f2] are friction
// force coefficients.
struct CruiseParams {
    double m = 150.0;
    double f0 = 0.1, f1 = 5.0, f2 = 0.25;
    double eps = 1.0;   // backup controller gain
    double v_star = 14.0;
    double r = 0.5;
    double R = 6.0;
    double w_lower = 1.0, w_upper = 2.0;
    double u_min = -1000.0, u_max = 3500.0;
    double delta = 0.01;
    double gamma = 0.15;
    double l_w = 1e-9;
    double q_v = 1.0, r_input = 1e-7;
    double iss_cap = 0.0; // no untargeted coordinates
};

BenchmarkProblem cruise_problem(const CruiseParams& params = {});

// Problem lookup for the CLI; applies flat "traction.*" / "cruise.*" overrides.
BenchmarkProblem make_problem(const std::string& name,
                              const std::vector<std::pair<std::string, double>>& overrides = {});

} // namespace stabilrl
