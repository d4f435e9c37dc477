#pragma once

#include <vector>

#include "induction/lti_core.hpp"
#include "induction/patient_model.hpp"

namespace induction {

/// Transfer x0 to a state whose fast components (x1, x4) equal the
/// equilibrium values, in minimum time, under 0 <= u <= u_max.
struct TimeOptimalProblem {
  LtiSystem system;
  Vec4 x0 = Vec4::Zero();
  Vec2 target_fast = Vec2::Zero();  // (x_e1, x_e4)
  double u_max = 0.0;
  EquilibriumState equilibrium;

  static TimeOptimalProblem from_equilibrium(const LtiSystem& system, const EquilibriumState& eq,
                                             double u_max, const Vec4& x0 = Vec4::Zero());

  // Throws DomainError for u_max <= 0 or a target equal to the initial fast state.
  void validate() const;

  // (x1, x4) - target
  Vec2 fast_error(const Vec4& x) const {
    return Vec2(x(0) - target_fast(0), x(3) - target_fast(1));
  }
};

/// Piecewise-constant infusion: levels[i] applies on [breakpoints[i-1], breakpoints[i]),
/// with 0 and t_f closing the first and last segment.
struct ControlSchedule {
  std::vector<double> levels;       // mg/min
  std::vector<double> breakpoints;  // min
  double t_f = 0.0;                 // min

  // Throws DomainError on broken invariants. A zero-length schedule is only
  // accepted when allow_empty is set.
  void validate(bool allow_empty = false) const;

  double level_at(double t) const;
  std::vector<double> durations() const;

  // Drops zero-length segments and merges equal neighbours.
  ControlSchedule canonical(double min_duration = 0.0) const;
};

}  // namespace induction
