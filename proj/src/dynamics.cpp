#include "stabilrl/dynamics.hpp"

namespace stabilrl {

Vec eval_dynamics(const SystemModel& model, const Vec& x, const Vec& u, const Vec& theta) {
    if (x.size() != model.n || u.size() != model.m || theta.size() != model.p)
        throw ConfigError("eval_dynamics: dimension mismatch");
    Vec fx = model.f(x);
    Mat Fx = model.F(x);
    Mat gx = model.g(x);
    if (fx.size() != model.n || Fx.rows() != model.n || Fx.cols() != model.p ||
        gx.rows() != model.n || gx.cols() != model.m)
        throw ConfigError("eval_dynamics: model map output dimensions inconsistent");
    return fx + Fx * theta + gx * u;
}

ShStep integrate_sh(const SystemModel& model, const Vec& x_k, const Vec& u_k,
                    const Vec& theta, const ShConfig& cfg) {
    cfg.validate();
    const double h = cfg.delta / cfg.substeps;

    auto rhs = [&](const Vec& x) -> Vec {
        Vec r = eval_dynamics(model, x, u_k, theta);
        if (model.disturbance) r += model.disturbance(x);
        return r;
    };

    ShStep out;
    out.intra.reserve(cfg.substeps);
    Vec x = x_k;
    for (int i = 0; i < cfg.substeps; ++i) {
        const Vec k1 = rhs(x);
        const Vec k2 = rhs(x + 0.5 * h * k1);
        const Vec k3 = rhs(x + 0.5 * h * k2);
        const Vec k4 = rhs(x + h * k3);
        Vec x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x_new.allFinite())
            throw IntegrationBlowup("integrate_sh: non-finite state at substep " +
                                        std::to_string(i),
                                    x);
        x = std::move(x_new);
        out.intra.push_back(x);
    }
    out.x_next = x;
    return out;
}

} // namespace stabilrl
