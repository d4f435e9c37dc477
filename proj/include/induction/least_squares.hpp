#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>

namespace induction {

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LeastSquaresOptions {
  std::size_t max_iterations = 100;
  double residual_tolerance = 1e-9;  // on the residual norm
  double step_tolerance = 1e-12;     // relative
  double fd_relative_step = 1e-7;
  // Absolute floor for the difference step, per unknown (scalar broadcast if size 1).
  Eigen::VectorXd fd_min_step = Eigen::VectorXd::Constant(1, 1e-9);
  // Box bounds; empty means unbounded.
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  // Use the infinity norm for the convergence test instead of the 2-norm.
  bool infinity_norm = false;
};

struct LeastSquaresResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Central-difference Jacobian with step max(rel * |x_i|, min_step_i).
Eigen::MatrixXd central_difference_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x,
                                            const LeastSquaresOptions& options);

/// Levenberg-Marquardt on ||f(x)||^2 with a finite-difference Jacobian and
/// projection onto the box bounds. Works for square, over- and
/// underdetermined systems.
LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                       const LeastSquaresOptions& options = {});

/// Newton iteration for square systems with step halving whenever a full
/// step does not decrease the residual norm.
LeastSquaresResult damped_newton(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                 const LeastSquaresOptions& options = {});

}  // namespace induction
