#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stabilrl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using StageCost = std::function<double(const Vec& x, const Vec& u)>;

// Bad dimensions, bad config values, unknown problem names.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Integrator produced a non-finite state; carries the last finite one.
struct IntegrationBlowup : std::runtime_error {
    Vec last_state;
    IntegrationBlowup(const std::string& what, Vec last)
        : std::runtime_error(what), last_state(std::move(last)) {}
};

// A runtime stability invariant was violated (state left the overshoot ball,
// or an unbounded coordinate exceeded its cap).
struct StabilityViolation : std::runtime_error {
    explicit StabilityViolation(const std::string& what) : std::runtime_error(what) {}
};

// Subset of state coordinates that is driven to a target point. Balls for the
// stability machinery are measured as deviation norms on these coordinates
// (the remaining coordinates are only required to stay bounded).
struct IndexSet {
    std::vector<int> indices; // nonempty
    Vec target;               // full-state target; only entries at `indices` are used

    double deviation_norm(const Vec& x) const {
        double s = 0.0;
        for (int i : indices) {
            const double d = x(i) - target(i);
            s += d * d;
        }
        return std::sqrt(s);
    }

    bool covers_all(int n) const { return static_cast<int>(indices.size()) == n; }
};

} // namespace stabilrl
