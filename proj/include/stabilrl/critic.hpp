#pragma once

#include "stabilrl/dynamics.hpp"

namespace stabilrl {

// Linear-in-weights value approximant Jhat(x, w) = <w, phi(x)>.
struct Regressor {
    int l = 0; // number of basis functions
    int n = 0; // state dimension
    std::function<Vec(const Vec&)> phi;      // l
    std::function<Mat(const Vec&)> grad_phi; // l x n
    std::function<std::vector<Mat>(const Vec&)> hess_phi; // l Hessians, each n x n
    double lipschitz_phi = 0.0; // L_phi(0, R*) over the working ball
};

// Norm annulus {w : w_lower <= ||w|| <= w_upper} plus the structural subset
// W' whose members dominate the Lyapunov function, and the recovery weight
// w# with Jhat(., w#) == V(.).
struct WeightSet {
    double w_lower = 0.0;
    double w_upper = 0.0;
    std::function<bool(const Vec&)> prime_predicate;
    Vec w_sharp;
};

struct CriticState {
    Vec w;
    Vec w_prev;
    double learning_rate_w = 0.0;
};

double critic_eval(const Regressor& reg, const Vec& w, const Vec& x);
Vec critic_grad_x(const Regressor& reg, const Vec& w, const Vec& x);

// One-step Bellman target: r(x,u) + <w, phi(x + delta * F(x,u,theta_hat))>.
// The predictor inside phi is a single explicit Euler step by construction.
double bellman_target(const Regressor& reg, const SystemModel& model, const StageCost& stage,
                      const Vec& x, const Vec& u, const Vec& w, const Vec& theta_hat,
                      double delta);

// Radial projection onto the norm annulus. A zero vector is pushed to radius
// w_lower along fallback_dir (or e_1 when that is also zero).
Vec project_weights(const Vec& w, const WeightSet& wset, const Vec& fallback_dir);

struct LsqResult {
    Vec w;
    bool ill_conditioned = false;
};

// Least-squares critic fit over the sample buffer. The target is affine in
// the weights, so the problem reduces to ridge-regularized normal equations
// in v over rows (phi(x) - phi(x_euler_next)), then projection onto the set.
LsqResult lsq_update(const Regressor& reg, const SystemModel& model, const StageCost& stage,
                     const std::vector<Vec>& samples,
                     const std::function<Vec(const Vec&)>& u_policy, const Vec& w_init,
                     const Vec& theta_hat, double delta, const WeightSet& wset,
                     double ridge = 1e-9);

// Gradient step on the squared temporal-difference error 0.5*e^2 with
// e = Jhat(x,w) - bellman_target(x,u,w), projected onto the set.
Vec gd_update(const Regressor& reg, const SystemModel& model, const StageCost& stage,
              const Vec& x, const Vec& u, const CriticState& critic, const Vec& theta_hat,
              double delta, const WeightSet& wset);

} // namespace stabilrl
