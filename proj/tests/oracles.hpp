#pragma once

// Reference computations that deliberately avoid the library's code paths.

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "induction/patient_model.hpp"
#include "induction/problem.hpp"

namespace induction::testing {

// e^{M t} by a truncated Taylor series on M t / 2^d followed by d squarings,
// with d chosen so the scaled norm is at most 1/2. Extra squarings only add
// rounding error.
inline Eigen::MatrixXd taylor_expm(const Eigen::MatrixXd& m, double t, int terms = 30) {
  const Eigen::Index n = m.rows();
  const double norm = (m * t).cwiseAbs().rowwise().sum().maxCoeff();
  const int doublings = norm > 0.5 ? static_cast<int>(std::ceil(std::log2(norm / 0.5))) : 0;
  const Eigen::MatrixXd x = m * (t / std::ldexp(1.0, doublings));
  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k < terms; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < doublings; ++i) sum = sum * sum;
  return sum;
}

// Exact constant-input step through the Taylor oracle on the augmented matrix.
inline Vec4 taylor_propagate(const Mat4& a, const Vec4& b, const Vec4& x0, double u, double dt) {
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(5, 5);
  block.topLeftCorner(4, 4) = a;
  block.topRightCorner(4, 1) = b * u;
  const Eigen::MatrixXd e = taylor_expm(block, dt);
  return e.topLeftCorner(4, 4) * x0 + e.topRightCorner(4, 1);
}

inline PatientDemographics reference_patient() { return {Sex::male, 53.0, 77.0, 177.0}; }

inline TimeOptimalProblem reference_problem() {
  const PkpdParameters p = schnider_parameters(reference_patient());
  return TimeOptimalProblem::from_equilibrium(assemble_system(p), equilibrium(p, 3.4), 106.0907);
}

// Random matrix with spectrum shifted into the open left half-plane.
inline Mat4 random_stable(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = u(rng);
  const double shift = r.cwiseAbs().rowwise().sum().maxCoeff() + 0.1;
  return r - shift * Mat4::Identity();
}

// V diag(lambda) V^-1 with eigenvalues at least 0.1 apart.
inline Mat4 random_real_spectrum(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::uniform_real_distribution<double> gap(0.1, 0.6);
  Mat4 v = Mat4::Identity();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) v(i, j) += u(rng);
  Vec4 lambda;
  double l = -0.01 - gap(rng);
  for (int i = 0; i < 4; ++i) {
    lambda(i) = l;
    l -= gap(rng);
  }
  return v * lambda.asDiagonal() * v.inverse();
}

inline PkpdParameters random_parameters(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PkpdParameters p;
  p.a10 = 0.1 + 0.9 * u(rng);
  p.a12 = 0.05 + 0.5 * u(rng);
  p.a13 = 0.05 + 0.3 * u(rng);
  p.a21 = 0.01 + 0.2 * u(rng);
  p.a31 = 0.001 + 0.01 * u(rng);
  p.ae0 = 0.1 + 0.8 * u(rng);
  p.v1 = 2.0 + 6.0 * u(rng);
  return p;
}

}  // namespace induction::testing
