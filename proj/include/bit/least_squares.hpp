#pragma once

#include <Eigen/Dense>
#include <functional>

namespace bit {

struct LeastSquaresOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-10;                 // stop when ||step|| drops below
    double residual_improvement_tolerance = 1e-8;  // relative cost improvement
};

struct LeastSquaresResult {
    Eigen::VectorXd parameters;
    double cost = 0.0;  // 0.5 * ||residuals||^2
    int iterations = 0;
    bool converged = false;
};

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Bounded trust-region least squares (Levenberg-Marquardt damping, box
/// constraints enforced by projection, forward-difference Jacobian).
/// The cost is non-increasing across accepted iterations.
LeastSquaresResult fit_bounded(const ResidualFunction& residuals,
                               const Eigen::VectorXd& initial_guess,
                               const Eigen::VectorXd& lower_bounds,
                               const Eigen::VectorXd& upper_bounds,
                               const LeastSquaresOptions& options = {});

}  // namespace bit
