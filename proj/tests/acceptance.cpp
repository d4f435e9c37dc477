// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "induction/ode.hpp"
#include "induction/shooting_solver.hpp"
#include "induction/strategy_solver.hpp"
#include "oracles.hpp"

using namespace induction;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const PkpdParameters params = schnider_parameters(testing::reference_patient());
  const LtiSystem sys = assemble_system(params);
  const TimeOptimalProblem prob = testing::reference_problem();

  {
    Mat4 paper;
    // clang-format off
    paper << -0.9175, 0.0683,  0.0035, 0.0,
              0.3020, -0.0683, 0.0,    0.0,
              0.1960, 0.0,     -0.0035, 0.0,
              0.1068, 0.0,     0.0,    -0.4560;
    // clang-format on
    const double err = (sys.a() - paper).cwiseAbs().maxCoeff();
    report(1, "parameter reproduction", err < 1e-4, fmt("max |A - A_ref| = %.2e", err));
  }

  {
    const EquilibriumState eq = equilibrium(params, 3.4);
    const double ex = (eq.x - Vec4(14.518, 64.2371, 813.008, 3.4)).cwiseAbs().maxCoeff();
    const double eu = std::abs(eq.u - 6.0907);
    report(2, "equilibrium reproduction", ex < 1e-3 && eu < 1e-4,
           fmt("max |x_e - ref| = %.2e, |u_e - ref| = %.2e", ex, eu));
  }

  {
    const double err = (sys.eigenvalues() - Vec4(-0.9419, -0.4560, -0.0451, -0.0024)).cwiseAbs().maxCoeff();
    const bool real = sys.has_real_spectrum();
    report(3, "spectrum", err < 1e-4 && real,
           fmt("max |lambda - ref| = %.2e, max |Im| = %.1e", err, sys.max_imaginary_part()));
  }

  const std::vector<StrategyResult> patterns = solve_all_patterns(prob);
  const StrategyResult best = select_optimal(patterns);
  {
    const double t_c = best.schedule->breakpoints.empty() ? NAN : best.schedule->breakpoints[0];
    const bool opt_ok = best.pattern.strategy == 3 && std::abs(t_c - 0.5467) < 1e-3 &&
                        std::abs(best.t_f() - 1.8397) < 1e-3;
    std::string infeasible_detail;
    bool infeasible_ok = true;
    for (const StrategyResult& r : patterns) {
      if (r.pattern.strategy == 3) continue;
      infeasible_detail += " S" + std::to_string(r.pattern.strategy) +
                           (r.feasible ? fmt("=feasible(t_f %.4f)", r.t_f()) : std::string("=infeasible"));
      infeasible_ok = infeasible_ok && !r.feasible;
    }
    report(4, "strategy method", opt_ok && infeasible_ok,
           fmt("optimum S%.0f t_c = %.6f t_f = %.6f;", best.pattern.strategy, t_c, best.t_f()) +
               infeasible_detail);
  }

  const std::vector<ShootingSeed> seeds = default_seed_grid();
  const ExtremalCertificate cert = solve_shooting(prob, seeds);
  {
    const bool ok = std::abs(cert.t_f - 1.8397) < 1e-3 && cert.residual_norm < 1e-8 &&
                    cert.switch_times.size() == 1 && std::abs(cert.switch_times[0] - 0.5467) < 1e-3;
    report(5, "shooting method", ok,
           fmt("t_f = %.6f, residual = %.1e, t_c = %.6f, seed %.0f", cert.t_f, cert.residual_norm,
               cert.switch_times.empty() ? NAN : cert.switch_times[0], static_cast<double>(cert.seed_index)));
  }

  {
    const double dtf = std::abs(cert.t_f - best.t_f());
    const bool same = cert.schedule.levels == best.schedule->levels;
    double dtc = 0.0;
    if (same) {
      for (std::size_t i = 0; i < cert.switch_times.size(); ++i) {
        dtc = std::max(dtc, std::abs(cert.switch_times[i] - best.schedule->breakpoints[i]));
      }
    }
    report(6, "cross-method agreement", dtf < 1e-3 && same,
           fmt("|dt_f| = %.1e, |dt_c| = %.1e, same structure: ", dtf, dtc) + (same ? "yes" : "no"));
  }

  {
    const Extremal ext = integrate_extremal(prob, cert.psi0, cert.t_f);
    const auto& states = ext.trajectory.states();
    const auto& control = ext.trajectory.control();
    double h_max = 0.0;
    int changes = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
      h_max = std::max(h_max, std::abs(hamiltonian(prob, states[i].head<4>(), control[i], states[i].tail<4>())));
      if (i > 0 && (states[i](4) > 0) != (states[i - 1](4) > 0)) ++changes;
    }
    report(7, "PMP certificate", h_max < 1e-7 && changes == 1,
           fmt("max |H| = %.1e, psi1 sign changes = %.0f", h_max, changes));
  }

  {
    const ControlSchedule& s = *best.schedule;
    Eigen::VectorXd x = prob.x0;
    double t0 = 0.0;
    const std::vector<double> ends{s.breakpoints[0], s.t_f};
    for (std::size_t i = 0; i < ends.size(); ++i) {
      const double u = s.levels[i];
      const Mat4 a = sys.a();
      const Vec4 b = sys.b();
      const VectorField f = [&a, &b, u](double, const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return a * y + b * u;
      };
      x = integrate(f, x, t0, ends[i]).back_state();
      t0 = ends[i];
    }
    const double err = (x - schedule_endpoint(sys, s)).cwiseAbs().maxCoeff();
    report(8, "oracle equivalence", err < 1e-8, fmt("max |x_expm - x_ode| = %.1e", err));
  }

  {
    const double x4 = schedule_endpoint(sys, *best.schedule)(3);
    const double b = bis(x4);
    report(9, "BIS endpoint", std::abs(b - 50.0) <= 0.5, fmt("BIS(x4(t_f)) = %.6f", b));
  }

  {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> t(0.0, 3.0), x(0.0, 20.0), pos(0.0, 50.0), u(0.0, 120.0);
    double semigroup = 0.0, eq_res = 0.0, inverse = 0.0, split = 0.0;
    bool monotone = true;
    for (int i = 0; i < 200; ++i) {
      const Eigen::MatrixXd m = testing::random_stable(rng);
      const double s1 = t(rng), s2 = t(rng);
      semigroup = std::max(semigroup, (expm_general(m, s1) * expm_general(m, s2) - expm_general(m, s1 + s2))
                                          .cwiseAbs()
                                          .maxCoeff());

      const PkpdParameters p = testing::random_parameters(rng);
      const LtiSystem rs = assemble_system(p);
      const EquilibriumState eq = equilibrium(p, 3.4);
      eq_res = std::max(eq_res, (rs.a() * eq.x + rs.b() * eq.u).cwiseAbs().maxCoeff());

      double lo = x(rng), hi = x(rng);
      if (lo > hi) std::swap(lo, hi);
      if (lo < hi) monotone = monotone && bis(hi) < bis(lo);
      const double target = 1.0 + 98.0 * (i + 0.5) / 200.0;
      inverse = std::max(inverse, std::abs(bis(bis_inverse(target)) - target) / target);

      const Vec4 x0(pos(rng), pos(rng), pos(rng), pos(rng));
      const double level = u(rng), h = t(rng);
      const Vec4 whole = propagate_constant(rs, x0, level, h);
      const Vec4 halves = propagate_constant(rs, propagate_constant(rs, x0, level, h / 2), level, h / 2);
      split = std::max(split, (whole - halves).cwiseAbs().maxCoeff() / std::max(1.0, whole.cwiseAbs().maxCoeff()));
    }
    const int rank = kalman_rank(sys);
    const bool ok = semigroup < 1e-10 && eq_res < 1e-12 && monotone && inverse < 1e-12 && rank == 4 &&
                    split < 1e-10;
    report(10, "property suites", ok,
           fmt("semigroup %.1e, equilibrium %.1e, bis inverse %.1e, split %.1e", semigroup, eq_res, inverse,
               split) +
               ", bis monotone " + (monotone ? "yes" : "no") + ", kalman rank " + std::to_string(rank));
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of 10 criteria failed (%.2f s)\n", failures, elapsed);
  return failures == 0 ? 0 : 1;
}
