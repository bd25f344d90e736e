#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace vergekit {

struct LevMarOptions {
    int max_iterations = 100;
    double gradient_tol = 1e-12;  // stop when max |J^T r| falls below this
    double step_tol = 1e-14;      // stop when the accepted step is this small
    double initial_lambda = 1e-3;
};

struct LevMarResult {
    Eigen::VectorXd params;
    std::vector<double> cost_history; // 0.5*sum(r^2) after each accepted step
    int iterations = 0;
    bool converged = false;
};

/// Gauss-Newton with Levenberg damping on 0.5*||r(x)||^2.
/// `residuals(x, r, J)` fills the residual vector and, when J != nullptr,
/// the Jacobian dr/dx. Steps are accepted only when the cost decreases, so
/// the cost history is non-increasing.
LevMarResult lm_solve(const Eigen::VectorXd& x0,
                      const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&,
                                               Eigen::MatrixXd*)>& residuals,
                      const LevMarOptions& opts = {});

} // namespace vergekit
