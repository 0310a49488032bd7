#include "stabilrl/actor.hpp"

#include <cmath>

namespace stabilrl {

namespace {

constexpr double kGolden = 0.6180339887498949; // (sqrt(5)-1)/2

// Golden-section minimization of fn over [a, b] to absolute tolerance tol.
template <typename Fn>
double golden_min(Fn&& fn, double a, double b, double tol) {
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = fn(x1), f2 = fn(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = fn(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = fn(x2);
        }
    }
    return 0.5 * (a + b);
}

bool lex_less(const Vec& a, const Vec& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a(i) < b(i)) return true;
        if (a(i) > b(i)) return false;
    }
    return false;
}

} // namespace

ActorResult solve_actor(const Regressor& reg, const SystemModel& model, const StageCost& stage,
                        const Vec& x, const Vec& w, const Vec& theta_hat, double delta,
                        const ControlBox& box, const Vec& backup_action,
                        const ActorConfig& cfg) {
    box.validate();
    const int m = static_cast<int>(box.lower.size());

    auto objective = [&](const Vec& u) {
        return bellman_target(reg, model, stage, x, u, w, theta_hat, delta);
    };

    std::vector<Vec> starts;
    starts.push_back(box.clip(backup_action));
    starts.push_back(box.midpoint());
    for (int s = 0; s <= cfg.segments; ++s) {
        const double t = static_cast<double>(s) / cfg.segments;
        starts.push_back(box.lower + t * (box.upper - box.lower));
    }

    Vec best_u = starts.front();
    double best_f = objective(best_u);
    for (const Vec& s : starts) {
        const double f = objective(s);
        if (f < best_f || (f == best_f && lex_less(s, best_u))) {
            best_f = f;
            best_u = s;
        }
    }

    // coordinate-wise golden-section refinement from each start
    for (const Vec& s : starts) {
        Vec u = s;
        const int sweeps = (m == 1) ? 1 : cfg.sweeps;
        for (int sweep = 0; sweep < sweeps; ++sweep) {
            for (int i = 0; i < m; ++i) {
                const double seg = (box.upper(i) - box.lower(i)) / cfg.segments;
                if (seg <= 0.0) continue;
                auto line = [&](double v) {
                    Vec uu = u;
                    uu(i) = v;
                    return objective(uu);
                };
                // bracket scan, then golden inside the best segment pair
                double seg_best = box.lower(i);
                double seg_best_f = line(seg_best);
                for (int k = 1; k <= cfg.segments; ++k) {
                    const double v = box.lower(i) + k * seg;
                    const double f = line(v);
                    if (f < seg_best_f) {
                        seg_best_f = f;
                        seg_best = v;
                    }
                }
                const double lo = std::max(box.lower(i), seg_best - seg);
                const double hi = std::min(box.upper(i), seg_best + seg);
                u(i) = golden_min(line, lo, hi, cfg.tol_u);
            }
        }
        const double f = objective(u);
        if (f < best_f || (f == best_f && lex_less(u, best_u))) {
            best_f = f;
            best_u = u;
        }
    }

    ActorResult out;
    out.u = box.clip(best_u);
    out.objective = best_f;
    out.improved = best_f <= objective(box.clip(backup_action));
    return out;
}

PolicyParams policy_gradient_step(const PolicyParams& params, const Vec& grad_J_sigma) {
    PolicyParams out = params;
    out.varsigma = params.varsigma - params.learning_rate * grad_J_sigma;
    return out;
}

Vec policy_objective_gradient(const Regressor& reg, const SystemModel& model,
                              const StageCost& stage, const Vec& x, const Vec& w,
                              const Vec& theta_hat, double delta,
                              const std::function<Vec(const Vec&, const Vec&)>& policy,
                              const Vec& varsigma, double fd_step) {
    Vec grad = Vec::Zero(varsigma.size());
    for (int i = 0; i < varsigma.size(); ++i) {
        Vec sp = varsigma, sm = varsigma;
        sp(i) += fd_step;
        sm(i) -= fd_step;
        const double fp = bellman_target(reg, model, stage, x, policy(sp, x), w, theta_hat, delta);
        const double fm = bellman_target(reg, model, stage, x, policy(sm, x), w, theta_hat, delta);
        grad(i) = (fp - fm) / (2.0 * fd_step);
    }
    return grad;
}

} // namespace stabilrl
