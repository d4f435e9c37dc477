#include "induction/shooting_solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "induction/errors.hpp"
#include "induction/least_squares.hpp"

namespace induction {

namespace {

// psi1 is a sum of four exponentials, so a real-spectrum extremal switches at
// most three times; anything beyond this bound is a runaway integration.
constexpr std::size_t kMaxSwitches = 16;

}  // namespace

double bang_control(double psi1, double u_max) { return psi1 > 0.0 ? 0.0 : u_max; }

Mat8 augmented_matrix(const LtiSystem& sys) {
  Mat8 m = Mat8::Zero();
  m.topLeftCorner<4, 4>() = sys.a();
  m.bottomRightCorner<4, 4>() = -sys.a().transpose();
  return m;
}

Vec8 augmented_dynamics(const TimeOptimalProblem& prob, const Vec8& z) {
  const Vec4 x = z.head<4>();
  const Vec4 psi = z.tail<4>();
  const double u = bang_control(psi(0), prob.u_max);
  Vec8 dz;
  dz.head<4>() = prob.system.a() * x + prob.system.b() * u;
  dz.tail<4>() = -prob.system.a().transpose() * psi;
  return dz;
}

double hamiltonian(const TimeOptimalProblem& prob, const Vec4& x, double u, const Vec4& psi) {
  return 1.0 + psi.dot(prob.system.a() * x + prob.system.b() * u);
}

ControlSchedule Extremal::schedule() const {
  ControlSchedule s;
  s.levels = levels;
  s.breakpoints = switch_times;
  s.t_f = trajectory.empty() ? 0.0 : trajectory.back_time();
  return s;
}

Extremal integrate_extremal(const TimeOptimalProblem& prob, const Vec4& psi0, double t_f,
                            const IntegratorOptions& options) {
  if (!(t_f > 0.0)) throw DomainError("integrate_extremal: t_f must be positive");

  const Mat4 a = prob.system.a();
  const Mat4 minus_at = -a.transpose();
  const Vec4 b = prob.system.b();

  Extremal ext;
  Eigen::VectorXd z(8);
  z << prob.x0, psi0;
  double level = bang_control(psi0(0), prob.u_max);
  double t = 0.0;

  while (true) {
    const double u = level;
    const VectorField field = [&a, &minus_at, &b, u](double, const Eigen::VectorXd& y) {
      Eigen::VectorXd dy(8);
      dy.head<4>() = a * y.head<4>() + b * u;
      dy.tail<4>() = minus_at * y.tail<4>();
      return dy;
    };
    SignEventOptions ev;
    ev.integrator = options;
    ev.stop_at_first = true;
    ev.initial_sign = level > 0.0 ? -1 : +1;

    SignEventResult seg = integrate_with_sign_event(field, z, t, t_f, 4, ev);
    seg.trajectory.set_control(level);
    ext.trajectory.append(seg.trajectory);
    ext.levels.push_back(level);

    if (seg.events.empty()) break;
    const double te = seg.events.front();
    if (te >= t_f) break;
    ext.switch_times.push_back(te);
    if (ext.switch_times.size() > kMaxSwitches) {
      throw IntegrationError("integrate_extremal: switching does not settle");
    }
    z = seg.trajectory.back_state();
    t = te;
    level = level > 0.0 ? 0.0 : prob.u_max;
  }

  const Eigen::VectorXd& z_end = ext.trajectory.back_state();
  ext.x_final = z_end.head<4>();
  ext.psi_final = z_end.tail<4>();
  ext.u_final = level;
  return ext;
}

Vec3 shooting_residual(const TimeOptimalProblem& prob, const Vec4& psi0, double t_f,
                       const IntegratorOptions& options) {
  const Extremal ext = integrate_extremal(prob, psi0, t_f, options);
  const Vec2 fast = prob.fast_error(ext.x_final);
  return Vec3(fast(0), fast(1), hamiltonian(prob, ext.x_final, ext.u_final, ext.psi_final));
}

std::vector<ShootingSeed> default_seed_grid() {
  const double psi_values[] = {-0.01, 0.01, -0.05, 0.05};
  const double tf_values[] = {1.0, 2.0, 4.0};
  std::vector<ShootingSeed> seeds;
  seeds.reserve(256 * 3);
  for (double tf : tf_values) {
    for (double p1 : psi_values) {
      for (double p2 : psi_values) {
        for (double p3 : psi_values) {
          for (double p4 : psi_values) seeds.push_back({Vec4(p1, p2, p3, p4), tf});
        }
      }
    }
  }
  return seeds;
}

ExtremalCertificate solve_shooting(const TimeOptimalProblem& prob,
                                   std::span<const ShootingSeed> seeds,
                                   const ShootingOptions& options) {
  prob.validate();
  if (seeds.empty()) throw DomainError("solve_shooting: empty seed set");

  const ResidualFunction residual = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    return shooting_residual(prob, p.head<4>(), p(4), options.integrator);
  };

  LeastSquaresOptions ls;
  ls.max_iterations = options.max_iterations;
  ls.residual_tolerance = options.residual_tolerance;
  ls.fd_relative_step = options.fd_relative_step;
  ls.fd_min_step = Eigen::VectorXd::Constant(5, 1e-9);
  ls.fd_min_step(4) = 1e-7;
  ls.lower = Eigen::VectorXd::Constant(5, -std::numeric_limits<double>::infinity());
  ls.lower(4) = 1e-3;

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    Eigen::VectorXd p0(5);
    p0 << seeds[i].psi0, seeds[i].t_f;

    LeastSquaresResult res;
    try {
      res = levenberg_marquardt(residual, p0, ls);
    } catch (const std::exception&) {
      continue;
    }
    best = std::min(best, res.residual_norm);
    if (!res.converged) continue;

    ExtremalCertificate cert;
    cert.psi0 = res.x.head<4>();
    cert.t_f = res.x(4);
    const Extremal ext = integrate_extremal(prob, cert.psi0, cert.t_f, options.integrator);
    if (ext.switch_times.size() > 3) continue;
    cert.switch_times = ext.switch_times;
    cert.residual_norm = res.residual_norm;
    cert.schedule = ext.schedule();
    cert.seed_index = i;
    cert.seeds_tried = i + 1;
    return cert;
  }

  std::ostringstream msg;
  msg << "shooting did not converge from any of " << seeds.size()
      << " seeds; best residual norm " << best;
  throw NoConvergenceError(msg.str(), best, seeds.size());
}

}  // namespace induction
