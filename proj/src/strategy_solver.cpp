#include "induction/strategy_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "induction/errors.hpp"
#include "induction/least_squares.hpp"

namespace induction {

namespace {

double level_value(Level l, double u_max) { return l == Level::full ? u_max : 0.0; }

// Ordered tuples t_1 <= ... <= t_n drawn from the grid horizon * j / points,
// j = 1..points, converted to segment durations.
std::vector<Eigen::VectorXd> simplex_starts(int dims, int points, double horizon) {
  std::vector<Eigen::VectorXd> out;
  std::vector<int> idx(static_cast<std::size_t>(dims), 1);
  const std::function<void(int, int)> rec = [&](int pos, int from) {
    if (pos == dims) {
      Eigen::VectorXd d(dims);
      double prev = 0.0;
      for (int i = 0; i < dims; ++i) {
        const double t = horizon * idx[static_cast<std::size_t>(i)] / points;
        d(i) = t - prev;
        prev = t;
      }
      out.push_back(d);
      return;
    }
    for (int j = from; j <= points; ++j) {
      idx[static_cast<std::size_t>(pos)] = j;
      rec(pos + 1, j);
    }
  };
  rec(0, 1);
  return out;
}

ControlSchedule schedule_from(const Pattern& pattern, const Eigen::VectorXd& durations,
                              double u_max) {
  ControlSchedule s;
  double t = 0.0;
  for (std::size_t i = 0; i < pattern.levels.size(); ++i) {
    s.levels.push_back(level_value(pattern.levels[i], u_max));
    t += durations(static_cast<Eigen::Index>(i));
    if (i + 1 < pattern.levels.size()) s.breakpoints.push_back(t);
  }
  s.t_f = t;
  return s;
}

}  // namespace

std::string Pattern::describe() const {
  std::ostringstream os;
  os << "Strategy " << strategy << " [";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    os << (i ? "," : "") << (levels[i] == Level::full ? "U" : "0");
  }
  os << "]";
  return os.str();
}

std::vector<Pattern> enumerate_patterns(std::optional<Level> start_level, int max_switches) {
  if (max_switches < 0) throw DomainError("enumerate_patterns: max_switches must be >= 0");
  std::vector<Pattern> out;
  for (int k = 0; k <= max_switches; ++k) {
    for (Level start : {Level::full, Level::off}) {
      if (start_level && *start_level != start) continue;
      Pattern p;
      p.strategy = 2 * k + (start == Level::full ? 1 : 2);
      Level l = start;
      for (int i = 0; i <= k; ++i) {
        p.levels.push_back(l);
        l = l == Level::full ? Level::off : Level::full;
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

Vec4 schedule_endpoint(const LtiSystem& sys, const ControlSchedule& schedule, const Vec4& x0) {
  Vec4 x = x0;
  const std::vector<double> d = schedule.durations();
  for (std::size_t i = 0; i < schedule.levels.size(); ++i) {
    x = propagate_constant(sys, x, schedule.levels[i], d[i]);
  }
  return x;
}

StrategyResult solve_pattern(const TimeOptimalProblem& prob, const Pattern& pattern,
                             const StrategyOptions& options) {
  const int n = static_cast<int>(pattern.levels.size());
  std::vector<double> levels;
  for (Level l : pattern.levels) levels.push_back(level_value(l, prob.u_max));

  const ResidualFunction residual = [&](const Eigen::VectorXd& d) -> Eigen::VectorXd {
    Vec4 x = prob.x0;
    for (int i = 0; i < n; ++i) {
      x = propagate_constant(prob.system, x, levels[static_cast<std::size_t>(i)], d(i));
    }
    return prob.fast_error(x);
  };

  LeastSquaresOptions ls;
  ls.max_iterations = 100;
  ls.residual_tolerance = options.feasible_residual;
  ls.step_tolerance = 1e-12;
  ls.infinity_norm = true;
  ls.fd_min_step = Eigen::VectorXd::Constant(1, 1e-8);
  ls.lower = Eigen::VectorXd::Zero(n);
  ls.upper = Eigen::VectorXd::Constant(n, options.horizon);

  StrategyResult result;
  result.pattern = pattern;
  double best_any = std::numeric_limits<double>::infinity();
  Vec2 best_any_residual = result.residual;

  for (const Eigen::VectorXd& start :
       simplex_starts(n, options.grid_points, options.horizon)) {
    ++result.starts;
    LeastSquaresResult res;
    try {
      res = n == 2 ? damped_newton(residual, start, ls) : levenberg_marquardt(residual, start, ls);
    } catch (const std::exception&) {
      continue;
    }
    if (res.residual_norm < best_any) {
      best_any = res.residual_norm;
      best_any_residual = res.residual;
    }
    if (!res.converged) continue;

    const bool all_present = (res.x.array() >= options.min_segment).all();
    const double t_f = res.x.sum();
    if (!all_present || t_f > options.horizon) continue;
    if (result.feasible && t_f >= result.t_f()) continue;

    result.feasible = true;
    result.schedule = schedule_from(pattern, res.x, prob.u_max);
    result.residual = res.residual;
  }

  if (!result.feasible) {
    result.residual = best_any_residual;
    result.schedule.reset();
  }
  return result;
}

std::vector<StrategyResult> solve_all_patterns(const TimeOptimalProblem& prob,
                                               const StrategyOptions& options) {
  prob.validate();
  const std::optional<Level> start =
      options.bolus_filter ? std::optional<Level>(Level::full) : std::nullopt;
  std::vector<StrategyResult> out;
  for (const Pattern& p : enumerate_patterns(start, 3)) out.push_back(solve_pattern(prob, p, options));
  return out;
}

StrategyResult select_optimal(const std::vector<StrategyResult>& results) {
  const StrategyResult* best = nullptr;
  for (const StrategyResult& r : results) {
    if (!r.feasible) continue;
    if (!best) {
      best = &r;
      continue;
    }
    const double diff = r.t_f() - best->t_f();
    if (diff < -1e-9 || (std::abs(diff) <= 1e-9 && r.pattern.switches() < best->pattern.switches())) {
      best = &r;
    }
  }
  if (!best) {
    double floor = std::numeric_limits<double>::infinity();
    for (const StrategyResult& r : results) {
      if (r.residual.allFinite()) floor = std::min(floor, r.residual.cwiseAbs().maxCoeff());
    }
    throw InfeasibleError("no bang-bang pattern reaches the target within the horizon", floor);
  }
  return *best;
}

StrategyResult solve_time_optimal(const TimeOptimalProblem& prob, const StrategyOptions& options) {
  prob.validate();
  if (kalman_rank(prob.system) != 4) throw DomainError("solve_time_optimal: (A, B) not controllable");
  if (!prob.system.has_real_spectrum()) {
    throw DomainError("solve_time_optimal: A must have a real spectrum");
  }
  return select_optimal(solve_all_patterns(prob, options));
}

}  // namespace induction
