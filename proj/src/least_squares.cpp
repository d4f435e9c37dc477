#include "induction/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace induction {

namespace {

double norm_of(const Eigen::VectorXd& r, bool inf) {
  if (!r.allFinite()) return std::numeric_limits<double>::infinity();
  return inf ? r.cwiseAbs().maxCoeff() : r.norm();
}

Eigen::VectorXd project(const Eigen::VectorXd& x, const LeastSquaresOptions& o) {
  Eigen::VectorXd y = x;
  if (o.lower.size() == x.size()) y = y.cwiseMax(o.lower);
  if (o.upper.size() == x.size()) y = y.cwiseMin(o.upper);
  return y;
}

double min_step(const LeastSquaresOptions& o, Eigen::Index i) {
  if (o.fd_min_step.size() == 0) return 0.0;
  return o.fd_min_step.size() == 1 ? o.fd_min_step(0) : o.fd_min_step(i);
}

// Residual evaluation that maps failures (integrator breakdown, domain
// errors) to an infinite residual so the caller can reject the trial point.
Eigen::VectorXd safe_eval(const ResidualFunction& f, const Eigen::VectorXd& x, Eigen::Index m) {
  try {
    return f(x);
  } catch (const std::exception&) {
    return Eigen::VectorXd::Constant(m, std::numeric_limits<double>::infinity());
  }
}

}  // namespace

Eigen::MatrixXd central_difference_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x,
                                            const LeastSquaresOptions& options) {
  Eigen::MatrixXd jac;
  const bool has_lower = options.lower.size() == x.size();
  const bool has_upper = options.upper.size() == x.size();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = std::max(options.fd_relative_step * std::abs(x(i)), min_step(options, i));
    double lo = x(i) - h;
    double hi = x(i) + h;
    if (has_lower && lo < options.lower(i)) lo = x(i);
    if (has_upper && hi > options.upper(i)) hi = x(i);
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp(i) = hi;
    xm(i) = lo;
    const Eigen::VectorXd fp = f(xp);
    const Eigen::VectorXd fm = f(xm);
    if (jac.size() == 0) jac.resize(fp.size(), x.size());
    jac.col(i) = (fp - fm) / (hi - lo);
  }
  return jac;
}

LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                       const LeastSquaresOptions& options) {
  LeastSquaresResult res;
  res.x = project(x0, options);
  res.residual = f(res.x);
  const Eigen::Index m = res.residual.size();
  res.residual_norm = norm_of(res.residual, options.infinity_norm);

  double mu = -1.0;
  double nu = 2.0;
  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    if (res.residual_norm < options.residual_tolerance) {
      res.converged = true;
      return res;
    }
    if (!std::isfinite(res.residual_norm)) return res;

    Eigen::MatrixXd jac;
    try {
      jac = central_difference_jacobian(f, res.x, options);
    } catch (const std::exception&) {
      return res;
    }
    if (!jac.allFinite()) return res;

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * res.residual;
    const double diag_max = jtj.diagonal().maxCoeff();
    if (diag_max <= 0.0) return res;
    const Eigen::VectorXd scale = jtj.diagonal().cwiseMax(1e-12 * diag_max);
    if (mu < 0.0) mu = 1e-3;

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += mu * scale;
      const Eigen::VectorXd delta = lhs.ldlt().solve(-grad);
      const Eigen::VectorXd x_new = project(res.x + delta, options);
      const Eigen::VectorXd step = x_new - res.x;

      if (step.norm() <= options.step_tolerance * (res.x.norm() + options.step_tolerance)) {
        return res;
      }

      const Eigen::VectorXd r_new = safe_eval(f, x_new, m);
      const double old_cost = res.residual.squaredNorm();
      const double new_cost = r_new.allFinite() ? r_new.squaredNorm()
                                                : std::numeric_limits<double>::infinity();
      const double predicted = old_cost - (res.residual + jac * step).squaredNorm();
      const double rho = predicted > 0.0 ? (old_cost - new_cost) / predicted : -1.0;

      if (rho > 0.0 && new_cost < old_cost) {
        res.x = x_new;
        res.residual = r_new;
        res.residual_norm = norm_of(r_new, options.infinity_norm);
        mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
        nu = 2.0;
        accepted = true;
      } else {
        mu *= nu;
        nu *= 2.0;
        if (mu > 1e16) return res;
      }
    }
  }
  res.converged = res.residual_norm < options.residual_tolerance;
  return res;
}

LeastSquaresResult damped_newton(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                 const LeastSquaresOptions& options) {
  LeastSquaresResult res;
  res.x = project(x0, options);
  res.residual = f(res.x);
  const Eigen::Index m = res.residual.size();
  res.residual_norm = norm_of(res.residual, options.infinity_norm);

  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    if (res.residual_norm < options.residual_tolerance) {
      res.converged = true;
      return res;
    }
    if (!std::isfinite(res.residual_norm)) return res;

    Eigen::MatrixXd jac;
    try {
      jac = central_difference_jacobian(f, res.x, options);
    } catch (const std::exception&) {
      return res;
    }
    if (!jac.allFinite()) return res;
    const Eigen::VectorXd delta = jac.completeOrthogonalDecomposition().solve(-res.residual);

    double lambda = 1.0;
    bool improved = false;
    for (int halvings = 0; halvings < 40; ++halvings, lambda *= 0.5) {
      const Eigen::VectorXd x_new = project(res.x + lambda * delta, options);
      const Eigen::VectorXd step = x_new - res.x;
      if (step.norm() <= options.step_tolerance * (res.x.norm() + options.step_tolerance)) break;
      const Eigen::VectorXd r_new = safe_eval(f, x_new, m);
      const double n_new = norm_of(r_new, options.infinity_norm);
      if (n_new < res.residual_norm) {
        res.x = x_new;
        res.residual = r_new;
        res.residual_norm = n_new;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  res.converged = res.residual_norm < options.residual_tolerance;
  return res;
}

}  // namespace induction
