#include "bit/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bit {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

/// Forward-difference Jacobian in normalized coordinates; the probe step is
/// flipped when it would leave the unit box.
Eigen::MatrixXd jacobian(const ResidualFunction& residuals, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& r0) {
    const auto n = y.size();
    Eigen::MatrixXd jac(r0.size(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double h = std::sqrt(std::numeric_limits<double>::epsilon()) *
                   std::max(std::abs(y[j]), 0.01);
        if (y[j] + h > 1.0) h = -h;
        Eigen::VectorXd probe = y;
        probe[j] += h;
        jac.col(j) = (residuals(probe) - r0) / h;
    }
    return jac;
}

}  // namespace

LeastSquaresResult fit_bounded(const ResidualFunction& residuals,
                               const Eigen::VectorXd& initial_guess,
                               const Eigen::VectorXd& lower_bounds,
                               const Eigen::VectorXd& upper_bounds,
                               const LeastSquaresOptions& options) {
    const auto n = initial_guess.size();
    if (lower_bounds.size() != n || upper_bounds.size() != n)
        throw std::invalid_argument("bound dimensions must match the parameter count");
    if (((upper_bounds - lower_bounds).array() < 0.0).any())
        throw std::invalid_argument("lower bound exceeds upper bound");

    // The solve runs in coordinates normalized to the box, [0,1] per
    // parameter, so ohms and farads condition identically. Zero-width
    // parameters stay pinned at their bound.
    const Eigen::VectorXd width = upper_bounds - lower_bounds;
    Eigen::VectorXd scale = width;
    for (Eigen::Index j = 0; j < n; ++j)
        if (scale[j] <= 0.0) scale[j] = 1.0;
    auto denormalize = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return lower_bounds + y.cwiseProduct(scale);
    };
    auto evaluate = [&](const Eigen::VectorXd& y) { return residuals(denormalize(y)); };

    const Eigen::VectorXd y_lo = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd y_hi(n);
    for (Eigen::Index j = 0; j < n; ++j) y_hi[j] = width[j] > 0.0 ? 1.0 : 0.0;

    Eigen::VectorXd y = project(
        (project(initial_guess, lower_bounds, upper_bounds) - lower_bounds)
            .cwiseQuotient(scale),
        y_lo, y_hi);
    Eigen::VectorXd r = evaluate(y);
    double cost = 0.5 * r.squaredNorm();

    LeastSquaresResult result;
    result.parameters = denormalize(y);
    result.cost = cost;

    double lambda = 1e-3;
    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        result.iterations = iteration + 1;
        const Eigen::MatrixXd jac = jacobian(evaluate, y, r);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd gradient = jac.transpose() * r;

        // Raise the damping until a step improves the cost.
        bool accepted = false;
        Eigen::VectorXd step;
        for (int attempt = 0; attempt < 32; ++attempt) {
            Eigen::MatrixXd damped = jtj;
            for (Eigen::Index i = 0; i < n; ++i)
                damped(i, i) += lambda * std::max(jtj(i, i), 1e-12);
            step = damped.ldlt().solve(-gradient);
            const Eigen::VectorXd candidate = project(y + step, y_lo, y_hi);
            const Eigen::VectorXd candidate_r = evaluate(candidate);
            const double candidate_cost = 0.5 * candidate_r.squaredNorm();
            if (candidate_cost < cost) {
                step = candidate - y;
                y = candidate;
                r = candidate_r;
                const double improvement = (cost - candidate_cost) / std::max(cost, 1e-300);
                cost = candidate_cost;
                accepted = true;
                lambda = std::max(lambda * 0.3, 1e-12);
                result.parameters = denormalize(y);
                result.cost = cost;
                if (step.norm() < options.step_tolerance ||
                    improvement < options.residual_improvement_tolerance) {
                    result.converged = true;
                    return result;
                }
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted) {
            // No improving step found at any damping: stationary within bounds.
            result.converged = true;
            return result;
        }
    }
    result.converged = false;  // iteration budget exhausted
    return result;
}

}  // namespace bit
