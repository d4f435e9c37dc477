#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "induction/problem.hpp"

namespace induction {

enum class Level { full, off };

/// Alternating bang-bang structure. Strategies are numbered 2k+1 for k
/// switches starting at full infusion and 2k+2 for k switches starting at zero.
struct Pattern {
  int strategy = 0;
  std::vector<Level> levels;

  int switches() const { return static_cast<int>(levels.size()) - 1; }
  std::string describe() const;
};

// All alternating patterns with up to max_switches switches; restricted to the
// given start level when one is supplied.
std::vector<Pattern> enumerate_patterns(std::optional<Level> start_level, int max_switches);

// Composes exact constant-input propagation across the schedule's segments.
Vec4 schedule_endpoint(const LtiSystem& sys, const ControlSchedule& schedule,
                       const Vec4& x0 = Vec4::Zero());

struct StrategyOptions {
  bool bolus_filter = true;     // only patterns starting at u_max
  double horizon = 30.0;        // min, upper bound on t_f
  int grid_points = 8;          // per time dimension
  double feasible_residual = 1e-9;
  double infeasible_residual = 1e-6;
  // Segments shorter than this (min) count as absent: such a root belongs to
  // a pattern with fewer switches.
  double min_segment = 1e-6;
};

struct StrategyResult {
  Pattern pattern;
  bool feasible = false;
  std::optional<ControlSchedule> schedule;
  Vec2 residual = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
  std::size_t starts = 0;

  double t_f() const { return schedule ? schedule->t_f : std::numeric_limits<double>::infinity(); }
};

/// Finds switch times and t_f for one pattern so that the fast components hit
/// the target. Among all roots with every segment present, the one with the
/// smallest t_f is reported. Infeasibility is a result, not an error.
StrategyResult solve_pattern(const TimeOptimalProblem& prob, const Pattern& pattern,
                             const StrategyOptions& options = {});

// solve_pattern over every enumerated pattern, in strategy order.
std::vector<StrategyResult> solve_all_patterns(const TimeOptimalProblem& prob,
                                               const StrategyOptions& options = {});

/// Minimal-t_f feasible pattern (ties go to fewer switches). Throws
/// DomainError for an uncontrollable or complex-spectrum system and
/// InfeasibleError when nothing is feasible.
StrategyResult solve_time_optimal(const TimeOptimalProblem& prob,
                                  const StrategyOptions& options = {});

// Picks the winner out of already solved patterns.
StrategyResult select_optimal(const std::vector<StrategyResult>& results);

}  // namespace induction
