#pragma once

#include "stabilrl/dynamics.hpp"

namespace stabilrl {

using ScalarFn = std::function<double(double)>;

// Adaptive control Lyapunov function with its certified decay rate nu, the
// backup policy mu, the adaptation gain Gamma and the class-K_inf bounding
// functions used to size the level-set machinery. V is stored independent of
// the parameter; grad_theta_V stays available for the modified-system hook
// and defaults to zero.
struct AdaptiveClf {
    std::function<double(const Vec&)> V;
    std::function<Vec(const Vec&)> grad_V;
    std::function<double(const Vec&, const Vec&)> nu; // (x, theta_hat) -> decay rate
    std::function<Vec(const Vec&, const Vec&)> mu;    // (x, theta_hat) -> backup input
    Mat Gamma;                                        // p x p, s.p.d.
    std::function<Vec(const Vec&, const Vec&)> grad_theta_V; // optional, (x, theta)

    ScalarFn q1, q1_inv; // q1(||x_I||) <= V-level lower bound, with inverse
    ScalarFn q2, q2_inv; // upper bound, with inverse
    ScalarFn alpha_nu;   // alpha_nu(||x_I||) <= nu(x, theta_hat)
};

struct ParameterEstimate {
    Vec theta_hat;
    std::vector<Vec> history;
};

// Estimator map tau(x) = F(x)^T grad_V(x).
Vec tau_aclf(const AdaptiveClf& clf, const SystemModel& model, const Vec& x);

// f + F*(theta + Gamma*grad_theta_V) + g*u. Reduces to eval_dynamics when V
// does not depend on theta.
Vec modified_dynamics(const AdaptiveClf& clf, const SystemModel& model, const Vec& x,
                      const Vec& u, const Vec& theta);

// Composite Lyapunov function V(x) + 0.5 * theta_tilde^T Gamma^{-1} theta_tilde.
double v_c(const AdaptiveClf& clf, const Vec& x, const Vec& theta_tilde);

// One grid point that failed the sampled backup decay check.
struct DecayViolation {
    Vec x;
    Vec theta_hat;
    double delta_vc;  // measured V_c difference over one SH step
    double required;  // -(delta/2) * nu(x, theta_hat)
    bool blowup = false;
};

struct BackupCertificate {
    std::vector<DecayViolation> violations;
    int points_checked = 0;
    int points_skipped_core = 0;
    bool empty() const { return violations.empty(); }
};

// Checks, for every grid pair (x, theta_hat) outside the core ball, that one
// sample-and-hold step under the backup pair (mu, w#) together with the
// discrete estimator update decreases V_c by at least (delta/2)*nu(x, theta_hat).
// The flow runs under the model's true parameter vector. An empty violation
// list is the numerical certificate at grid resolution.
BackupCertificate verify_decay_backup(const AdaptiveClf& clf, const SystemModel& model,
                                      const std::vector<Vec>& x_grid,
                                      const std::vector<Vec>& theta_hat_grid, double delta,
                                      const IndexSet& index_I, double core_radius,
                                      int substeps = 10);

} // namespace stabilrl
