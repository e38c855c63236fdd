#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "bit/least_squares.hpp"
#include "bit/rng.hpp"

using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> values) {
    VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double value : values) v[i++] = value;
    return v;
}

}  // namespace

TEST_CASE("exact solution of an unconstrained quadratic") {
    // residuals = A x - b with a well-conditioned A; the minimizer is the
    // linear solve, reachable to high accuracy in a handful of iterations.
    Eigen::MatrixXd a(3, 2);
    a << 2.0, 0.5, -1.0, 3.0, 0.25, 0.25;
    const VectorXd truth = vec({1.5, -2.25});
    const VectorXd b = a * truth;

    const auto result = bit::fit_bounded(
        [&](const VectorXd& x) -> VectorXd { return a * x - b; },
        vec({0.0, 0.0}), vec({-10.0, -10.0}), vec({10.0, 10.0}));

    CHECK(result.converged);
    CHECK((result.parameters - truth).norm() < 1e-6);
    CHECK(result.cost < 1e-12);
}

TEST_CASE("rosenbrock valley converges from a cold start") {
    const auto result = bit::fit_bounded(
        [](const VectorXd& x) -> VectorXd {
            return vec({10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]});
        },
        vec({-1.2, 1.0}), vec({-5.0, -5.0}), vec({5.0, 5.0}));

    CHECK(result.converged);
    CHECK(std::abs(result.parameters[0] - 1.0) < 1e-4);
    CHECK(std::abs(result.parameters[1] - 1.0) < 1e-4);
}

TEST_CASE("box constraints clip the solution onto the active bound") {
    // Unconstrained minimizer is x = 3, but the box ends at 2.
    const auto result = bit::fit_bounded(
        [](const VectorXd& x) -> VectorXd { return vec({x[0] - 3.0}); },
        vec({0.0}), vec({-2.0}), vec({2.0}));

    CHECK(result.parameters[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(result.cost == doctest::Approx(0.5).epsilon(1e-9));

    // Iterates never leave the box, even transiently.
    bool stayed_inside = true;
    bit::fit_bounded(
        [&](const VectorXd& x) -> VectorXd {
            if (x[0] < -2.0 - 1e-12 || x[0] > 2.0 + 1e-12) stayed_inside = false;
            return vec({x[0] - 3.0});
        },
        vec({1.5}), vec({-2.0}), vec({2.0}));
    CHECK(stayed_inside);
}

TEST_CASE("accepted iterations never increase the cost") {
    // A bumpy 1-D landscape: the reported final cost never exceeds the
    // starting cost and is consistent with the returned parameters.
    double initial_cost = -1.0;
    const auto residuals = [&](const VectorXd& x) -> VectorXd {
        const double r = (x[0] - 1.0) * (x[0] + 2.0) + 0.3 * std::sin(5.0 * x[0]);
        if (initial_cost < 0.0) initial_cost = 0.5 * r * r;
        return vec({r});
    };
    const auto result = bit::fit_bounded(residuals, vec({0.3}), vec({-10.0}),
                                         vec({10.0}));
    CHECK(result.cost <= initial_cost);
    const double r_final = residuals(result.parameters)[0];
    CHECK(result.cost == doctest::Approx(0.5 * r_final * r_final).epsilon(1e-12));
}

TEST_CASE("iteration budget is honored and reported") {
    bit::LeastSquaresOptions options;
    options.max_iterations = 3;
    options.step_tolerance = 0.0;
    options.residual_improvement_tolerance = 0.0;
    const auto result = bit::fit_bounded(
        [](const VectorXd& x) -> VectorXd {
            return vec({10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]});
        },
        vec({-1.2, 1.0}), vec({-5.0, -5.0}), vec({5.0, 5.0}), options);
    CHECK(result.iterations <= 3);
    CHECK_FALSE(result.converged);
}

TEST_CASE("dimension mismatches are rejected") {
    const auto residuals = [](const VectorXd& x) -> VectorXd {
        return vec({x[0]});
    };
    CHECK_THROWS_AS(bit::fit_bounded(residuals, vec({0.0}), vec({-1.0, -1.0}),
                                     vec({1.0, 1.0})),
                    std::invalid_argument);
    CHECK_THROWS_AS(bit::fit_bounded(residuals, vec({0.0}), vec({-1.0}),
                                     vec({1.0, 1.0})),
                    std::invalid_argument);
    // Lower bound above the upper bound.
    CHECK_THROWS_AS(bit::fit_bounded(residuals, vec({0.0}), vec({2.0}),
                                     vec({-2.0})),
                    std::invalid_argument);
}

TEST_CASE("randomized linear problems recover the generating parameters") {
    bit::Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd a(6, 3);
        for (Eigen::Index i = 0; i < a.size(); ++i)
            a(i / 3, i % 3) = rng.uniform(-2.0, 2.0);
        a += 3.0 * Eigen::MatrixXd::Identity(6, 3);  // keep it well-conditioned
        const VectorXd truth = vec({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                    rng.uniform(-1.0, 1.0)});
        const VectorXd b = a * truth;
        const auto result = bit::fit_bounded(
            [&](const VectorXd& x) -> VectorXd { return a * x - b; },
            vec({0.0, 0.0, 0.0}), vec({-5.0, -5.0, -5.0}), vec({5.0, 5.0, 5.0}));
        CHECK(result.converged);
        CHECK((result.parameters - truth).norm() < 1e-5);
    }
}
