#include "induction/problem.hpp"

#include <algorithm>
#include <cmath>

#include "induction/errors.hpp"

namespace induction {

TimeOptimalProblem TimeOptimalProblem::from_equilibrium(const LtiSystem& system,
                                                        const EquilibriumState& eq, double u_max,
                                                        const Vec4& x0) {
  TimeOptimalProblem prob{system, x0, Vec2(eq.x(0), eq.x(3)), u_max, eq};
  prob.validate();
  return prob;
}

void TimeOptimalProblem::validate() const {
  if (!(u_max > 0.0) || !std::isfinite(u_max)) throw DomainError("u_max must be positive");
  if (!x0.allFinite() || !target_fast.allFinite()) throw DomainError("non-finite problem data");
  if (fast_error(x0).cwiseAbs().maxCoeff() == 0.0) {
    throw DomainError("target fast state equals the initial fast state; nothing to steer");
  }
}

void ControlSchedule::validate(bool allow_empty) const {
  if (!std::isfinite(t_f) || t_f < 0.0) throw DomainError("schedule: t_f must be finite and >= 0");
  if (t_f == 0.0 && !allow_empty) throw DomainError("schedule: t_f must be positive");
  if (levels.size() != breakpoints.size() + 1) {
    throw DomainError("schedule: need exactly one more level than breakpoints");
  }
  for (double u : levels) {
    if (!std::isfinite(u) || u < 0.0) throw DomainError("schedule: levels must be finite and >= 0");
  }
  double prev = 0.0;
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const double b = breakpoints[i];
    if (!(b > prev) || !(b < t_f)) {
      throw DomainError("schedule: breakpoints must increase strictly inside (0, t_f)");
    }
    if (levels[i] == levels[i + 1]) throw DomainError("schedule: adjacent levels must differ");
    prev = b;
  }
}

double ControlSchedule::level_at(double t) const {
  if (levels.empty()) return 0.0;
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  return levels[static_cast<std::size_t>(std::distance(breakpoints.begin(), it))];
}

std::vector<double> ControlSchedule::durations() const {
  std::vector<double> out;
  out.reserve(levels.size());
  double prev = 0.0;
  for (double b : breakpoints) {
    out.push_back(b - prev);
    prev = b;
  }
  out.push_back(t_f - prev);
  return out;
}

ControlSchedule ControlSchedule::canonical(double min_duration) const {
  ControlSchedule out;
  out.t_f = t_f;
  const std::vector<double> d = durations();
  double t = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double start = t;
    t += d[i];
    if (d[i] <= min_duration) continue;
    if (!out.levels.empty() && out.levels.back() == levels[i]) continue;
    if (!out.levels.empty()) out.breakpoints.push_back(start);
    out.levels.push_back(levels[i]);
  }
  if (out.levels.empty() && !levels.empty()) out.levels.push_back(levels.front());
  return out;
}

}  // namespace induction
