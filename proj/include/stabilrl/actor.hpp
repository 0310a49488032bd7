#pragma once

#include "stabilrl/critic.hpp"

namespace stabilrl {

// Admissible input box; stands in for the compact control set associated
// with the Lyapunov function.
struct ControlBox {
    Vec lower, upper;

    void validate() const {
        if (lower.size() != upper.size())
            throw ConfigError("ControlBox: bound dimensions differ");
        for (int i = 0; i < lower.size(); ++i)
            if (lower(i) > upper(i)) throw ConfigError("ControlBox: lower > upper");
    }
    Vec clip(const Vec& u) const {
        return u.cwiseMax(lower).cwiseMin(upper);
    }
    Vec midpoint() const { return 0.5 * (lower + upper); }
};

struct PolicyParams {
    Vec varsigma;
    double learning_rate = 0.0;
};

struct ActorConfig {
    double tol_u = 1e-8; // absolute tolerance on the control variable
    int segments = 8;    // per-coordinate bracket subdivisions
    int sweeps = 3;      // coordinate-descent sweeps for m > 1
};

struct ActorResult {
    Vec u;
    double objective;
    bool improved = true; // false: best multistart point returned unrefined gain
};

// Minimizes the one-step Bellman target over the box by multistart
// coordinate-wise golden-section refinement. The multistart set always
// contains the (clipped) backup action and the box midpoint, so the result
// never scores worse than the backup in the one-step objective. Ties are
// broken deterministically toward lexicographically smaller u.
ActorResult solve_actor(const Regressor& reg, const SystemModel& model, const StageCost& stage,
                        const Vec& x, const Vec& w, const Vec& theta_hat, double delta,
                        const ControlBox& box, const Vec& backup_action,
                        const ActorConfig& cfg = {});

// varsigma <- varsigma - l_varsigma * grad.
PolicyParams policy_gradient_step(const PolicyParams& params, const Vec& grad_J_sigma);

// Central finite differences of the Bellman target through the Euler
// predictor, for a parameterized policy u(varsigma; x).
Vec policy_objective_gradient(const Regressor& reg, const SystemModel& model,
                              const StageCost& stage, const Vec& x, const Vec& w,
                              const Vec& theta_hat, double delta,
                              const std::function<Vec(const Vec& varsigma, const Vec& x)>& policy,
                              const Vec& varsigma, double fd_step = 1e-6);

} // namespace stabilrl
