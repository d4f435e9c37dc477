#include "induction/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "induction/errors.hpp"

namespace induction {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (Hairer, Norsett & Wanner, dense output of order 4).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

Eigen::VectorXd Trajectory::eval_step(const StepInterpolant& s, double t) const {
  const double theta = (t - s.t0) / s.h;
  const double theta1 = 1.0 - theta;
  const auto& r = s.coeffs;
  return r[0] + theta * (r[1] + theta1 * (r[2] + theta * (r[3] + theta1 * r[4])));
}

Eigen::VectorXd Trajectory::sample(double t) const {
  if (times_.empty()) throw DomainError("Trajectory::sample: empty trajectory");
  const double slack = 1e-12 * std::max(1.0, std::abs(times_.back()));
  if (t < times_.front() - slack || t > times_.back() + slack) {
    throw DomainError("Trajectory::sample: time " + std::to_string(t) + " outside trajectory");
  }
  if (times_.size() == 1 || t <= times_.front()) return states_.front();
  if (t >= times_.back()) return states_.back();
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto i = static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
  return eval_step(steps_[i], t);
}

void Trajectory::set_control(double level) { control_.assign(times_.size(), level); }

void Trajectory::append(const Trajectory& other) {
  if (other.empty()) return;
  if (empty()) {
    *this = other;
    return;
  }
  const bool with_control = !control_.empty() && !other.control_.empty();
  if (with_control) control_.back() = other.control_.front();
  for (std::size_t i = 1; i < other.times_.size(); ++i) {
    times_.push_back(other.times_[i]);
    states_.push_back(other.states_[i]);
    if (with_control) control_.push_back(other.control_[i]);
  }
  steps_.insert(steps_.end(), other.steps_.begin(), other.steps_.end());
  if (!with_control) control_.clear();
}

/// One adaptive Dormand-Prince run. Optionally watches a component for sign
/// changes and localizes them by bisection on the continuous extension.
class DormandPrince {
 public:
  DormandPrince(const VectorField& f, const IntegratorOptions& options) : f_(f), opt_(options) {}

  SignEventResult run(const Eigen::VectorXd& x0, double t0, double t1, const std::size_t* watch,
                      bool stop_at_first, int initial_sign, double time_tol) {
    if (!(t1 >= t0)) throw DomainError("integrate: t1 must not precede t0");
    if (!x0.allFinite()) throw DomainError("integrate: non-finite initial state");
    if (watch && *watch >= static_cast<std::size_t>(x0.size())) {
      throw DomainError("integrate_with_sign_event: watched component out of range");
    }

    SignEventResult out;
    Trajectory& traj = out.trajectory;
    traj.times_.push_back(t0);
    traj.states_.push_back(x0);
    if (t1 == t0) return out;

    Eigen::VectorXd y = x0;
    Eigen::VectorXd k1 = f_(t0, y);
    double t = t0;
    double h = initial_step(y, k1, t1 - t0);
    int ref_sign = 0;
    if (watch) ref_sign = initial_sign != 0 ? sign_of(initial_sign) : sign_of(y(*watch));

    const double span = t1 - t0;
    std::size_t steps = 0;
    while (t < t1) {
      if (++steps > opt_.max_steps) throw IntegrationError("integrate: step budget exhausted");
      const double remaining = t1 - t;
      bool last = false;
      if (h >= remaining || remaining - h < 1e-12 * span) {
        h = remaining;
        last = true;
      }

      const Eigen::VectorXd k2 = f_(t + c2 * h, y + h * (a21 * k1));
      const Eigen::VectorXd k3 = f_(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      const Eigen::VectorXd k4 = f_(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      const Eigen::VectorXd k5 =
          f_(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Eigen::VectorXd k6 =
          f_(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Eigen::VectorXd y_new =
          y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const Eigen::VectorXd k7 = f_(t + h, y_new);

      const Eigen::VectorXd err_vec =
          h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const Eigen::ArrayXd scale =
          opt_.abs_tol + opt_.rel_tol * y.array().abs().max(y_new.array().abs());
      const double err = std::sqrt((err_vec.array() / scale).square().mean());

      if (!std::isfinite(err) || err > 1.0) {
        const double factor =
            std::isfinite(err) ? std::max(kMinFactor, kSafety * std::pow(err, -0.2)) : kMinFactor;
        h *= factor;
        if (h < opt_.min_step) {
          throw IntegrationError("integrate: step size underflow at t = " + std::to_string(t));
        }
        continue;
      }

      Trajectory::StepInterpolant interp;
      interp.t0 = t;
      interp.h = h;
      const Eigen::VectorXd ydiff = y_new - y;
      const Eigen::VectorXd bspl = h * k1 - ydiff;
      interp.coeffs[0] = y;
      interp.coeffs[1] = ydiff;
      interp.coeffs[2] = bspl;
      interp.coeffs[3] = ydiff - h * k7 - bspl;
      interp.coeffs[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

      const double t_new = last ? t1 : t + h;

      if (watch) {
        const int new_sign = sign_of(y_new(*watch));
        if (ref_sign == 0) {
          ref_sign = new_sign;
        } else if (new_sign != 0 && new_sign != ref_sign) {
          const double te = locate(traj, interp, t, t_new, *watch, ref_sign, time_tol);
          out.events.push_back(te);
          ref_sign = new_sign;
          if (stop_at_first) {
            traj.steps_.push_back(interp);
            traj.times_.push_back(te);
            traj.states_.push_back(traj.eval_step(interp, te));
            return out;
          }
        }
      }

      traj.steps_.push_back(std::move(interp));
      traj.times_.push_back(t_new);
      traj.states_.push_back(y_new);

      t = t_new;
      y = y_new;
      k1 = k7;
      if (last) break;

      const double factor =
          err == 0.0 ? kMaxFactor : std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
      h = std::min(h * factor, opt_.max_step);
    }
    return out;
  }

 private:
  double initial_step(const Eigen::VectorXd& y, const Eigen::VectorXd& f0,
                      double span) const {
    if (opt_.initial_step > 0.0) return std::min(opt_.initial_step, span);
    const Eigen::ArrayXd scale = opt_.abs_tol + opt_.rel_tol * y.array().abs();
    const double d0 = std::sqrt((y.array() / scale).square().mean());
    const double d1n = std::sqrt((f0.array() / scale).square().mean());
    double h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h = std::min({h, span, opt_.max_step});
    return std::max(h, opt_.min_step);
  }

  // Bisection for the crossing inside [ta, tb] on the step interpolant.
  static double locate(const Trajectory& traj, const Trajectory::StepInterpolant& interp,
                       double ta, double tb, std::size_t watch, int ref_sign, double time_tol) {
    double lo = ta;
    double hi = tb;
    while (hi - lo > time_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const int s = sign_of(traj.eval_step(interp, mid)(watch));
      if (s == ref_sign) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  const VectorField& f_;
  IntegratorOptions opt_;
};

Trajectory integrate(const VectorField& f, const Eigen::VectorXd& x0, double t0, double t1,
                     const IntegratorOptions& options) {
  DormandPrince dp(f, options);
  return dp.run(x0, t0, t1, nullptr, false, 0, 0.0).trajectory;
}

SignEventResult integrate_with_sign_event(const VectorField& f, const Eigen::VectorXd& x0,
                                          double t0, double t1, std::size_t watch,
                                          const SignEventOptions& options) {
  DormandPrince dp(f, options.integrator);
  return dp.run(x0, t0, t1, &watch, options.stop_at_first, options.initial_sign,
                options.time_tolerance);
}

}  // namespace induction
