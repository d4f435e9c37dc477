#include "induction/lti_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unsupported/Eigen/MatrixFunctions>

#include "induction/errors.hpp"

namespace induction {

LtiSystem::LtiSystem(const Mat4& a, const Vec4& b) : a_(a), b_(b) {
  if (!a_.allFinite() || !b_.allFinite()) throw DomainError("LtiSystem: non-finite entries");

  Eigen::EigenSolver<Mat4> solver(a_);
  if (solver.info() != Eigen::Success) {
    eigen_real_.setConstant(std::numeric_limits<double>::quiet_NaN());
    return;
  }
  const Eigen::Vector4cd values = solver.eigenvalues();
  const Eigen::Matrix4cd vectors = solver.eigenvectors();

  std::array<int, 4> order{};
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return values(i).real() < values(j).real(); });

  max_imag_ = values.imag().cwiseAbs().maxCoeff();
  real_spectrum_ = max_imag_ < kRealTolerance;
  for (int k = 0; k < 4; ++k) eigen_real_(k) = values(order[k]).real();
  if (!real_spectrum_) return;

  double separation = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 4; ++k) separation = std::min(separation, eigen_real_(k) - eigen_real_(k - 1));
  if (separation <= kMinEigenSeparation) return;

  Spectrum s;
  s.eigenvalues = eigen_real_;
  for (int k = 0; k < 4; ++k) s.vectors.col(k) = vectors.col(order[k]).real();
  Eigen::FullPivLU<Mat4> lu(s.vectors);
  if (!lu.isInvertible()) return;
  s.inverse = lu.inverse();
  spectrum_ = s;
}

Eigen::MatrixXd expm_general(const Eigen::MatrixXd& m, double t) {
  if (m.rows() != m.cols()) throw DomainError("expm: matrix must be square");
  if (!m.allFinite() || !std::isfinite(t)) throw DomainError("expm: non-finite input");
  const Eigen::MatrixXd scaled = m * t;
  return scaled.exp();
}

Mat4 expm_spectral(const Spectrum& s, double t) {
  if (!std::isfinite(t)) throw DomainError("expm: non-finite time");
  const Vec4 d = (s.eigenvalues * t).array().exp();
  return s.vectors * d.asDiagonal() * s.inverse;
}

Mat4 expm(const LtiSystem& sys, double t) {
  if (sys.spectrum()) return expm_spectral(*sys.spectrum(), t);
  return expm_general(sys.a(), t);
}

Vec4 propagate_constant(const LtiSystem& sys, const Vec4& x0, double u, double dt) {
  if (!(dt >= 0.0)) throw DomainError("propagate_constant: dt must be non-negative");
  if (!x0.allFinite() || !std::isfinite(u)) throw DomainError("propagate_constant: non-finite input");
  if (dt == 0.0) return x0;

  Eigen::Matrix<double, 5, 5> block = Eigen::Matrix<double, 5, 5>::Zero();
  block.topLeftCorner<4, 4>() = sys.a();
  block.topRightCorner<4, 1>() = sys.b() * u;
  const Eigen::Matrix<double, 5, 5> e = (block * dt).exp();
  return e.topLeftCorner<4, 4>() * x0 + e.topRightCorner<4, 1>();
}

int kalman_rank(const LtiSystem& sys) {
  Mat4 reach;
  Vec4 col = sys.b();
  for (int k = 0; k < 4; ++k) {
    reach.col(k) = col;
    col = sys.a() * col;
  }
  Eigen::JacobiSVD<Mat4> svd(reach);
  const Vec4 sigma = svd.singularValues();
  if (sigma(0) == 0.0) return 0;
  const double threshold = 1e-10 * sigma(0);
  return static_cast<int>((sigma.array() > threshold).count());
}

}  // namespace induction
