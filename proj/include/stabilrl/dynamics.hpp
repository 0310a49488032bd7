#pragma once

#include "stabilrl/types.hpp"

namespace stabilrl {

// Control-affine system with a linearly entering parameter vector:
//   xdot = f(x) + F(x) theta + g(x) u
// f and F vanish at the origin for regulation problems; target-shifted
// benchmarks relax that and only ask for practical stability of a subset
// of coordinates.
struct SystemModel {
    int n = 0; // state dimension
    int m = 0; // input dimension
    int p = 0; // parameter dimension

    std::function<Vec(const Vec&)> f; // n
    std::function<Mat(const Vec&)> F; // n x p
    std::function<Mat(const Vec&)> g; // n x m

    // Hidden from the controller; the simulator integrates with it.
    Vec theta_true;

    // Optional unmodeled additive term. Applied by the simulator only, never
    // by eval_dynamics, so the controller cannot see it.
    std::function<Vec(const Vec&)> disturbance;
};

struct ShConfig {
    double delta = 0.01; // sampling period
    int substeps = 10;   // integrator substeps per period

    void validate() const {
        if (delta <= 0.0) throw ConfigError("ShConfig: delta must be > 0");
        if (substeps < 1) throw ConfigError("ShConfig: substeps must be >= 1");
    }
};

struct StateTrajectory {
    std::vector<double> times;     // sample instants k*delta
    std::vector<Vec> states;       // x_k at those instants
    std::vector<Vec> intra_samples; // substep states for overshoot monitoring
};

struct ShStep {
    Vec x_next;
    std::vector<Vec> intra; // substep states, last one equals x_next
};

// f(x) + F(x)*theta + g(x)*u with dimension checks.
Vec eval_dynamics(const SystemModel& model, const Vec& x, const Vec& u, const Vec& theta);

// Integrates the flow over one sampling period with the input held constant,
// using classical fixed-step RK4. Throws IntegrationBlowup on non-finite
// states. The disturbance hook, when set, is added to the integrand.
ShStep integrate_sh(const SystemModel& model, const Vec& x_k, const Vec& u_k,
                    const Vec& theta, const ShConfig& cfg);

} // namespace stabilrl
