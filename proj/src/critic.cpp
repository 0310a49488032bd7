#include "stabilrl/critic.hpp"

namespace stabilrl {

double critic_eval(const Regressor& reg, const Vec& w, const Vec& x) {
    if (w.size() != reg.l) throw ConfigError("critic_eval: weight dimension mismatch");
    return w.dot(reg.phi(x));
}

Vec critic_grad_x(const Regressor& reg, const Vec& w, const Vec& x) {
    return reg.grad_phi(x).transpose() * w;
}

double bellman_target(const Regressor& reg, const SystemModel& model, const StageCost& stage,
                      const Vec& x, const Vec& u, const Vec& w, const Vec& theta_hat,
                      double delta) {
    const Vec x_pred = x + delta * eval_dynamics(model, x, u, theta_hat);
    return stage(x, u) + w.dot(reg.phi(x_pred));
}

Vec project_weights(const Vec& w, const WeightSet& wset, const Vec& fallback_dir) {
    const double nrm = w.norm();
    if (nrm > wset.w_upper) return w * (wset.w_upper / nrm);
    if (nrm >= wset.w_lower) return w;
    if (nrm > 0.0) return w * (wset.w_lower / nrm);
    Vec dir = fallback_dir;
    if (dir.size() != w.size() || dir.norm() == 0.0) {
        dir = Vec::Zero(w.size());
        dir(0) = 1.0;
    }
    return dir * (wset.w_lower / dir.norm());
}

LsqResult lsq_update(const Regressor& reg, const SystemModel& model, const StageCost& stage,
                     const std::vector<Vec>& samples,
                     const std::function<Vec(const Vec&)>& u_policy, const Vec& w_init,
                     const Vec& theta_hat, double delta, const WeightSet& wset,
                     double ridge) {
    if (samples.empty()) throw ConfigError("lsq_update: needs at least one sample");

    // minimize sum_j (v^T a_j - r_j)^2 with a_j = phi(x_j) - phi(x_j + delta*Fcal)
    Mat A = ridge * Mat::Identity(reg.l, reg.l);
    Vec b = Vec::Zero(reg.l);
    for (const Vec& xj : samples) {
        const Vec uj = u_policy(xj);
        const Vec x_pred = xj + delta * eval_dynamics(model, xj, uj, theta_hat);
        const Vec aj = reg.phi(xj) - reg.phi(x_pred);
        A += aj * aj.transpose();
        b += aj * stage(xj, uj);
    }

    Eigen::LDLT<Mat> ldlt(A);
    LsqResult out;
    if (ldlt.info() != Eigen::Success) {
        out.w = w_init;
        out.ill_conditioned = true;
        return out;
    }
    Vec v = ldlt.solve(b);
    if (!v.allFinite()) {
        out.w = w_init;
        out.ill_conditioned = true;
        return out;
    }
    out.w = project_weights(v, wset, w_init);
    return out;
}

Vec gd_update(const Regressor& reg, const SystemModel& model, const StageCost& stage,
              const Vec& x, const Vec& u, const CriticState& critic, const Vec& theta_hat,
              double delta, const WeightSet& wset) {
    const double e =
        critic_eval(reg, critic.w, x) -
        bellman_target(reg, model, stage, x, u, critic.w, theta_hat, delta);
    const Vec x_pred = x + delta * eval_dynamics(model, x, u, theta_hat);
    const Vec grad_e = reg.phi(x) - reg.phi(x_pred);
    const Vec w_new = critic.w - critic.learning_rate_w * e * grad_e;
    return project_weights(w_new, wset, critic.w);
}

} // namespace stabilrl
