#include "stabilrl/aclf.hpp"

namespace stabilrl {

Vec tau_aclf(const AdaptiveClf& clf, const SystemModel& model, const Vec& x) {
    return model.F(x).transpose() * clf.grad_V(x);
}

Vec modified_dynamics(const AdaptiveClf& clf, const SystemModel& model, const Vec& x,
                      const Vec& u, const Vec& theta) {
    Vec theta_eff = theta;
    if (clf.grad_theta_V) theta_eff += clf.Gamma * clf.grad_theta_V(x, theta);
    return eval_dynamics(model, x, u, theta_eff);
}

double v_c(const AdaptiveClf& clf, const Vec& x, const Vec& theta_tilde) {
    const Vec y = clf.Gamma.ldlt().solve(theta_tilde);
    return clf.V(x) + 0.5 * theta_tilde.dot(y);
}

BackupCertificate verify_decay_backup(const AdaptiveClf& clf, const SystemModel& model,
                                      const std::vector<Vec>& x_grid,
                                      const std::vector<Vec>& theta_hat_grid, double delta,
                                      const IndexSet& index_I, double core_radius,
                                      int substeps) {
    BackupCertificate cert;
    ShConfig sh{delta, substeps};
    for (const Vec& x : x_grid) {
        if (index_I.deviation_norm(x) <= core_radius) {
            cert.points_skipped_core += static_cast<int>(theta_hat_grid.size());
            continue; // decay is only required outside the core ball
        }
        for (const Vec& th_hat : theta_hat_grid) {
            ++cert.points_checked;
            const Vec theta_tilde = model.theta_true - th_hat;
            const double vc0 = v_c(clf, x, theta_tilde);
            const double required = -0.5 * delta * clf.nu(x, th_hat);

            const Vec u = clf.mu(x, th_hat);
            Vec x_next;
            try {
                x_next = integrate_sh(model, x, u, model.theta_true, sh).x_next;
            } catch (const IntegrationBlowup&) {
                cert.violations.push_back({x, th_hat, 0.0, required, true});
                continue;
            }
            const Vec th_hat_next = th_hat + delta * (clf.Gamma * tau_aclf(clf, model, x));
            const double vc1 = v_c(clf, x_next, model.theta_true - th_hat_next);
            const double dvc = vc1 - vc0;
            if (dvc > required)
                cert.violations.push_back({x, th_hat, dvc, required, false});
        }
    }
    return cert;
}

} // namespace stabilrl
