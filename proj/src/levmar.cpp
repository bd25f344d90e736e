#include "vergekit/levmar.hpp"

#include <cmath>

namespace vergekit {

LevMarResult lm_solve(const Eigen::VectorXd& x0,
                      const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&,
                                               Eigen::MatrixXd*)>& residuals,
                      const LevMarOptions& opts) {
    LevMarResult out;
    out.params = x0;

    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    residuals(out.params, r, &jac);
    double cost = 0.5 * r.squaredNorm();
    out.cost_history.push_back(cost);

    double lambda = opts.initial_lambda;

    for (int it = 0; it < opts.max_iterations; ++it) {
        out.iterations = it + 1;
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        if (g.cwiseAbs().maxCoeff() < opts.gradient_tol) {
            out.converged = true;
            break;
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            Eigen::MatrixXd a = jtj;
            a.diagonal().array() += lambda * (jtj.diagonal().array().abs() + 1e-12);
            const Eigen::VectorXd step = a.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            const Eigen::VectorXd x_new = out.params + step;
            Eigen::VectorXd r_new;
            residuals(x_new, r_new, nullptr);
            const double cost_new = 0.5 * r_new.squaredNorm();
            if (std::isfinite(cost_new) && cost_new < cost) {
                out.params = x_new;
                cost = cost_new;
                out.cost_history.push_back(cost);
                residuals(out.params, r, &jac);
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (step.cwiseAbs().maxCoeff() < opts.step_tol * (1.0 + out.params.cwiseAbs().maxCoeff())) {
                    out.converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            // No damping value improves the cost: numerical optimum reached.
            out.converged = true;
            break;
        }
        if (out.converged) break;
    }
    if (!out.converged && out.cost_history.size() >= 2) {
        const double last = out.cost_history.back();
        const double prev = out.cost_history[out.cost_history.size() - 2];
        if (prev - last < 1e-15 * (1.0 + prev)) out.converged = true;
    }
    return out;
}

} // namespace vergekit
