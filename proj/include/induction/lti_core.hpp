#pragma once

#include <Eigen/Dense>
#include <optional>

namespace induction {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

// Eigendecomposition A = V diag(lambda) V^-1 with a real spectrum.
struct Spectrum {
  Vec4 eigenvalues;  // ascending
  Mat4 vectors;      // columns match eigenvalues
  Mat4 inverse;
};

/// Single-input LTI system x' = A x + B u with its spectral data computed once
/// at construction. The cache is only populated when the spectrum is real and
/// the eigenvalues are separated by more than kMinEigenSeparation, so that the
/// V D(t) V^-1 form is well conditioned.
class LtiSystem {
 public:
  static constexpr double kRealTolerance = 1e-10;
  static constexpr double kMinEigenSeparation = 1e-6;

  LtiSystem(const Mat4& a, const Vec4& b);

  const Mat4& a() const noexcept { return a_; }
  const Vec4& b() const noexcept { return b_; }

  // Empty when the spectrum is complex or clustered.
  const std::optional<Spectrum>& spectrum() const noexcept { return spectrum_; }

  // Real parts of the eigenvalues, ascending.
  const Vec4& eigenvalues() const noexcept { return eigen_real_; }
  bool has_real_spectrum() const noexcept { return real_spectrum_; }
  double max_imaginary_part() const noexcept { return max_imag_; }

 private:
  Mat4 a_;
  Vec4 b_;
  Vec4 eigen_real_;
  double max_imag_ = 0.0;
  bool real_spectrum_ = false;
  std::optional<Spectrum> spectrum_;
};

// e^{M t} for any square matrix by Padé scaling-and-squaring.
Eigen::MatrixXd expm_general(const Eigen::MatrixXd& m, double t);

// e^{D t} from a cached eigendecomposition: V diag(e^{lambda t}) V^-1.
Mat4 expm_spectral(const Spectrum& s, double t);

// e^{A t}; spectral route when the cache is valid, otherwise the general route.
Mat4 expm(const LtiSystem& sys, double t);

/// Exact affine update for constant input u over dt:
///   x(dt) = e^{A dt} x0 + (int_0^dt e^{A s} ds) B u
/// obtained from the exponential of the 5x5 block matrix [[A, B u], [0, 0]].
/// Throws DomainError for dt < 0.
Vec4 propagate_constant(const LtiSystem& sys, const Vec4& x0, double u, double dt);

// Numerical rank of [B, AB, A^2B, A^3B], threshold 1e-10 * sigma_max.
int kalman_rank(const LtiSystem& sys);

}  // namespace induction
