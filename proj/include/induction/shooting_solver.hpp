#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "induction/ode.hpp"
#include "induction/problem.hpp"

namespace induction {

using Vec3 = Eigen::Vector3d;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

// Minimizer of the Hamiltonian over [0, u_max]; psi1 == 0 resolves to u_max.
double bang_control(double psi1, double u_max);

// Block matrix diag(A, -A^T) driving z = (x, psi).
Mat8 augmented_matrix(const LtiSystem& sys);

// z' = (A x + B u(psi1), -A^T psi).
Vec8 augmented_dynamics(const TimeOptimalProblem& prob, const Vec8& z);

// 1 + psi^T (A x + B u)
double hamiltonian(const TimeOptimalProblem& prob, const Vec4& x, double u, const Vec4& psi);

/// Extremal generated by an initial costate: the 8-dimensional trajectory,
/// the psi1 sign changes where the control switched, and the final state.
struct Extremal {
  Trajectory trajectory;
  std::vector<double> switch_times;
  std::vector<double> levels;  // control level on each segment
  Vec4 x_final = Vec4::Zero();
  Vec4 psi_final = Vec4::Zero();
  double u_final = 0.0;

  ControlSchedule schedule() const;
};

/// Integrates the state/costate system from (x0, psi0) to t_f with the
/// bang-bang law, restarting the integrator at every psi1 crossing.
Extremal integrate_extremal(const TimeOptimalProblem& prob, const Vec4& psi0, double t_f,
                            const IntegratorOptions& options = {});

/// (x1(t_f) - x_e1, x4(t_f) - x_e4, H(t_f)).
Vec3 shooting_residual(const TimeOptimalProblem& prob, const Vec4& psi0, double t_f,
                       const IntegratorOptions& options = {});

struct ShootingSeed {
  Vec4 psi0;
  double t_f;
};

/// psi0 in {-0.01, 0.01, -0.05, 0.05}^4 crossed with t_f in {1, 2, 4},
/// t_f varying slowest.
std::vector<ShootingSeed> default_seed_grid();

struct ShootingOptions {
  IntegratorOptions integrator;
  std::size_t max_iterations = 60;
  double residual_tolerance = 1e-8;
  double fd_relative_step = 1e-7;
};

struct ExtremalCertificate {
  Vec4 psi0 = Vec4::Zero();
  double t_f = 0.0;
  std::vector<double> switch_times;
  double residual_norm = 0.0;
  ControlSchedule schedule;
  std::size_t seed_index = 0;
  std::size_t seeds_tried = 0;
};

/// Solves the three boundary conditions for the five unknowns (psi0, t_f) by
/// Levenberg-Marquardt from each seed in order; the first seed whose residual
/// norm drops below the tolerance wins. Throws NoConvergenceError otherwise.
ExtremalCertificate solve_shooting(const TimeOptimalProblem& prob,
                                   std::span<const ShootingSeed> seeds,
                                   const ShootingOptions& options = {});

}  // namespace induction
