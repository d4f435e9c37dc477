#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace induction {

using VectorField = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& x)>;

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 0.0;  // 0 selects a step from the local derivative scale
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-14;
  std::size_t max_steps = 1'000'000;
};

/// Accepted integration points plus the Dormand-Prince continuous extension
/// of each step, so the solution can be sampled anywhere in [front, back].
class Trajectory {
 public:
  Trajectory() = default;

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<Eigen::VectorXd>& states() const noexcept { return states_; }
  // Control level active on each accepted step's left end; empty for
  // trajectories of autonomous vector fields.
  const std::vector<double>& control() const noexcept { return control_; }

  bool empty() const noexcept { return times_.empty(); }
  double front_time() const { return times_.front(); }
  double back_time() const { return times_.back(); }
  const Eigen::VectorXd& back_state() const { return states_.back(); }

  // Dense-output sample; throws DomainError outside the covered interval.
  Eigen::VectorXd sample(double t) const;

  void set_control(double level);
  // Appends `other`, whose first point must coincide with this back point.
  void append(const Trajectory& other);

 private:
  friend class DormandPrince;

  struct StepInterpolant {
    double t0;
    double h;
    std::array<Eigen::VectorXd, 5> coeffs;
  };

  Eigen::VectorXd eval_step(const StepInterpolant& s, double t) const;

  std::vector<double> times_;
  std::vector<Eigen::VectorXd> states_;
  std::vector<double> control_;
  std::vector<StepInterpolant> steps_;
};

/// Adaptive Dormand-Prince 5(4) integration of x' = f(t, x) from t0 to t1.
/// Throws IntegrationError when the step falls below options.min_step.
Trajectory integrate(const VectorField& f, const Eigen::VectorXd& x0, double t0, double t1,
                     const IntegratorOptions& options = {});

struct SignEventOptions {
  IntegratorOptions integrator;
  // Stop the integration at the first crossing.
  bool stop_at_first = false;
  // Sign assumed for the watched component at t0: +1, -1, or 0 to take it
  // from the initial value. Needed when restarting exactly on a crossing.
  int initial_sign = 0;
  // Bisection width on the interpolated solution.
  double time_tolerance = 1e-13;
};

struct SignEventResult {
  Trajectory trajectory;
  std::vector<double> events;
};

/// Integrates like integrate() and reports every time the watched component
/// changes sign, localized by bisection on the dense output.
SignEventResult integrate_with_sign_event(const VectorField& f, const Eigen::VectorXd& x0,
                                          double t0, double t1, std::size_t watch,
                                          const SignEventOptions& options = {});

}  // namespace induction
