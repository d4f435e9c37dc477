#include "induction/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "induction/errors.hpp"
#include "induction/shooting_solver.hpp"
#include "induction/strategy_solver.hpp"

namespace induction::cli {

namespace {

using nlohmann::json;

double require_number(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ConfigError(std::string("missing required field '") + key + "'");
  if (!doc.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return doc.at(key).get<double>();
}

std::optional<double> optional_number(const json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  if (!doc.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return doc.at(key).get<double>();
}

json vec_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(emit(v(i)));
  return arr;
}

json mat_json(const Mat4& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

std::string fmt10(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v == 0.0 ? 0.0 : v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::shooting: return "shooting";
    case Method::strategy: return "strategy";
    case Method::both: return "both";
  }
  return "both";
}

Vec4 initial_state(const RunConfig& config) { return config.x0.value_or(Vec4::Zero()); }

}  // namespace

Method parse_method(const std::string& text) {
  if (text == "shooting") return Method::shooting;
  if (text == "strategy") return Method::strategy;
  if (text == "both") return Method::both;
  throw ConfigError("method must be shooting, strategy or both (got '" + text + "')");
}

void RunConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("step must be positive");
  if (u_max && !(*u_max > 0.0)) throw ConfigError("u_max must be positive");
  try {
    demographics.validate();
    bis.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!(bis_target > 0.0) || !(bis_target < bis.bis0)) {
    throw ConfigError("bis_target must lie strictly between 0 and bis0");
  }
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c;
  if (!doc.contains("sex")) throw ConfigError("missing required field 'sex'");
  if (!doc.at("sex").is_string()) throw ConfigError("field 'sex' must be a string");
  try {
    c.demographics.sex = parse_sex(doc.at("sex").get<std::string>());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  c.demographics.age = require_number(doc, "age");
  c.demographics.weight = require_number(doc, "weight");
  c.demographics.height = require_number(doc, "height");

  if (auto v = optional_number(doc, "bis0")) c.bis.bis0 = *v;
  if (auto v = optional_number(doc, "ec50")) c.bis.ec50 = *v;
  if (auto v = optional_number(doc, "gamma")) c.bis.gamma = *v;
  if (auto v = optional_number(doc, "bis_target")) c.bis_target = *v;
  c.u_max = optional_number(doc, "u_max");
  if (auto v = optional_number(doc, "step")) c.step = *v;
  if (doc.contains("method")) {
    if (!doc.at("method").is_string()) throw ConfigError("field 'method' must be a string");
    c.method = parse_method(doc.at("method").get<std::string>());
  }
  if (doc.contains("out")) {
    if (!doc.at("out").is_string()) throw ConfigError("field 'out' must be a string");
    c.out_dir = doc.at("out").get<std::string>();
  }
  if (doc.contains("x0")) {
    const json& x0 = doc.at("x0");
    if (!x0.is_array() || x0.size() != 4) throw ConfigError("field 'x0' must be an array of 4 numbers");
    Vec4 v;
    for (int i = 0; i < 4; ++i) {
      if (!x0[static_cast<std::size_t>(i)].is_number()) {
        throw ConfigError("field 'x0' must be an array of 4 numbers");
      }
      v(i) = x0[static_cast<std::size_t>(i)].get<double>();
    }
    c.x0 = v;
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

ResolvedPatient resolve(const RunConfig& config) {
  try {
    const PkpdParameters params = schnider_parameters(config.demographics);
    const double lbm =
        lean_body_mass(config.demographics.sex, config.demographics.weight, config.demographics.height);
    const double effect_target = bis_inverse(config.bis_target, config.bis);
    return ResolvedPatient{params, assemble_system(params), equilibrium(params, effect_target), lbm};
  } catch (const DegenerateDemographicsError& e) {
    throw ConfigError(e.what());
  } catch (const ParameterOutOfRangeError& e) {
    throw ConfigError(e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

TimeOptimalProblem build_problem(const RunConfig& config, const ResolvedPatient& patient) {
  if (!config.u_max) throw ConfigError("missing required field 'u_max'");
  if (!(*config.u_max > patient.equilibrium.u)) {
    throw ConfigError("u_max = " + fmt10(*config.u_max) + " does not exceed u_e = " +
                      fmt10(patient.equilibrium.u) + "; target unreachable from rest");
  }
  try {
    return TimeOptimalProblem::from_equilibrium(patient.system, patient.equilibrium, *config.u_max,
                                                initial_state(config));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

double emit(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(fmt10(v));
}

json schedule_to_json(const ControlSchedule& schedule, const Vec4& endpoint) {
  json doc;
  doc["u_levels"] = json::array();
  for (double u : schedule.levels) doc["u_levels"].push_back(emit(u));
  doc["breakpoints"] = json::array();
  for (double b : schedule.breakpoints) doc["breakpoints"].push_back(emit(b));
  doc["t_f"] = emit(schedule.t_f);
  doc["endpoint"] = vec_json(endpoint);
  return doc;
}

ControlSchedule schedule_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("schedule must be a JSON object");
  for (const char* key : {"u_levels", "breakpoints"}) {
    if (!doc.contains(key) || !doc.at(key).is_array()) {
      throw ConfigError(std::string("schedule field '") + key + "' must be an array");
    }
    for (const json& v : doc.at(key)) {
      if (!v.is_number()) throw ConfigError(std::string("schedule field '") + key + "' must hold numbers");
    }
  }
  ControlSchedule s;
  s.levels = doc.at("u_levels").get<std::vector<double>>();
  s.breakpoints = doc.at("breakpoints").get<std::vector<double>>();
  s.t_f = require_number(doc, "t_f");
  if (s.t_f == 0.0 && s.levels.empty() && s.breakpoints.empty()) s.levels.push_back(0.0);
  try {
    s.validate(/*allow_empty=*/true);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("malformed schedule: ") + e.what());
  }
  return s;
}

std::string trajectory_csv(const LtiSystem& sys, const Vec4& x0, const ControlSchedule& schedule,
                           double step, const BisParameters& bp) {
  if (!(step > 0.0)) throw ConfigError("step must be positive");
  std::vector<double> seg_start{0.0};
  seg_start.insert(seg_start.end(), schedule.breakpoints.begin(), schedule.breakpoints.end());
  std::vector<Vec4> seg_state{x0};
  const std::vector<double> d = schedule.durations();
  for (std::size_t i = 0; i + 1 < schedule.levels.size(); ++i) {
    seg_state.push_back(propagate_constant(sys, seg_state.back(), schedule.levels[i], d[i]));
  }

  auto row = [&](std::ostringstream& os, double t) {
    const auto it = std::upper_bound(seg_start.begin(), seg_start.end(), t);
    const auto k = static_cast<std::size_t>(std::distance(seg_start.begin(), it)) - 1;
    const double u = schedule.levels[k];
    const Vec4 x = propagate_constant(sys, seg_state[k], u, t - seg_start[k]);
    const double x4 = x(3) < 0.0 && x(3) > -1e-9 ? 0.0 : x(3);
    os << fmt10(t) << ',' << fmt10(x(0)) << ',' << fmt10(x(1)) << ',' << fmt10(x(2)) << ','
       << fmt10(x(3)) << ',' << fmt10(u) << ',' << fmt10(bis(x4, bp)) << '\n';
  };

  std::ostringstream os;
  os << "t,x1,x2,x3,x4,u,bis\n";
  const double t_f = schedule.t_f;
  const double eps = 1e-9 * step;
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * step;
    if (t >= t_f - eps) break;
    row(os, t);
  }
  row(os, t_f);
  return os.str();
}

json cmd_params(const RunConfig& config) {
  const ResolvedPatient pt = resolve(config);
  json doc;
  doc["sex"] = std::string(to_string(config.demographics.sex));
  doc["age"] = emit(config.demographics.age);
  doc["weight"] = emit(config.demographics.weight);
  doc["height"] = emit(config.demographics.height);
  doc["lbm"] = emit(pt.lbm);
  doc["a10"] = emit(pt.params.a10);
  doc["a12"] = emit(pt.params.a12);
  doc["a13"] = emit(pt.params.a13);
  doc["a21"] = emit(pt.params.a21);
  doc["a31"] = emit(pt.params.a31);
  doc["ae0"] = emit(pt.params.ae0);
  doc["v1"] = emit(pt.params.v1);
  doc["A"] = mat_json(pt.system.a());
  doc["B"] = vec_json(pt.system.b());
  doc["eigenvalues"] = vec_json(pt.system.eigenvalues());
  doc["real_spectrum"] = pt.system.has_real_spectrum();
  doc["kalman_rank"] = kalman_rank(pt.system);
  doc["bis_target"] = emit(config.bis_target);
  doc["x_e"] = vec_json(pt.equilibrium.x);
  doc["u_e"] = emit(pt.equilibrium.u);
  return doc;
}

json cmd_solve(const RunConfig& config) {
  const ResolvedPatient pt = resolve(config);
  const TimeOptimalProblem prob = build_problem(config, pt);
  std::filesystem::create_directories(config.out_dir);

  json summary;
  summary["method"] = method_name(config.method);
  std::optional<ControlSchedule> strategy_schedule;
  std::optional<ControlSchedule> shooting_schedule;

  // Files carry the schedule at emission precision; endpoint and trajectory
  // are computed from that same rounded schedule so a replay reproduces them.
  auto emit_solution = [&](const std::string& name, const ControlSchedule& exact, json extra) {
    ControlSchedule s = exact;
    for (double& u : s.levels) u = emit(u);
    for (double& b : s.breakpoints) b = emit(b);
    s.t_f = emit(s.t_f);
    const Vec4 end = schedule_endpoint(prob.system, s, prob.x0);
    json doc = schedule_to_json(s, end);
    for (auto& [k, v] : extra.items()) doc[k] = v;
    write_text(config.out_dir / (name + "_schedule.json"), doc.dump(2) + "\n");
    write_text(config.out_dir / (name + "_trajectory.csv"),
               trajectory_csv(prob.system, prob.x0, s, config.step, config.bis));
    summary[name] = doc;
  };

  if (config.method != Method::shooting) {
    const StrategyResult r = solve_time_optimal(prob);
    strategy_schedule = *r.schedule;
    emit_solution("strategy", *r.schedule,
                  json{{"strategy", r.pattern.strategy},
                       {"residual", vec_json(r.residual)}});
  }
  if (config.method != Method::strategy) {
    const std::vector<ShootingSeed> seeds = default_seed_grid();
    const ExtremalCertificate c = solve_shooting(prob, seeds);
    shooting_schedule = c.schedule;
    emit_solution("shooting", c.schedule,
                  json{{"psi0", vec_json(c.psi0)},
                       {"residual_norm", emit(c.residual_norm)},
                       {"seed_index", c.seed_index}});
  }
  if (strategy_schedule && shooting_schedule) {
    json cmp;
    cmp["t_f_strategy"] = emit(strategy_schedule->t_f);
    cmp["t_f_shooting"] = emit(shooting_schedule->t_f);
    cmp["delta_t_f"] = emit(std::abs(strategy_schedule->t_f - shooting_schedule->t_f));
    const bool same = strategy_schedule->levels == shooting_schedule->levels;
    cmp["same_structure"] = same;
    if (same) {
      double dtc = 0.0;
      for (std::size_t i = 0; i < strategy_schedule->breakpoints.size(); ++i) {
        dtc = std::max(dtc, std::abs(strategy_schedule->breakpoints[i] - shooting_schedule->breakpoints[i]));
      }
      cmp["delta_t_c"] = emit(dtc);
    } else {
      cmp["delta_t_c"] = nullptr;
    }
    write_text(config.out_dir / "comparison.json", cmp.dump(2) + "\n");
    summary["comparison"] = cmp;
  }
  return summary;
}

json cmd_simulate(const RunConfig& config, const std::filesystem::path& schedule_path) {
  const ResolvedPatient pt = resolve(config);
  std::ifstream in(schedule_path);
  if (!in) throw ConfigError("cannot open schedule " + schedule_path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("malformed schedule " + schedule_path.string() + ": " + e.what());
  }
  const ControlSchedule s = schedule_from_json(doc);
  const Vec4 x0 = initial_state(config);
  std::filesystem::create_directories(config.out_dir);
  write_text(config.out_dir / "trajectory.csv", trajectory_csv(pt.system, x0, s, config.step, config.bis));
  const Vec4 end = schedule_endpoint(pt.system, s, x0);
  json out;
  out["t_f"] = emit(s.t_f);
  out["endpoint"] = vec_json(end);
  out["bis"] = emit(bis(std::max(end(3), 0.0), config.bis));
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Time-optimal propofol induction: patient model and bang-bang infusion solvers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string method;
  std::string out_dir;
  std::optional<double> step;
  std::string schedule_path;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Patient/problem JSON config")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--step", step, "Trajectory sampling step (min)");
  };
  CLI::App* params = app.add_subcommand("params", "Report model parameters as JSON");
  params->add_option("--config", config_path, "Patient/problem JSON config")->required();
  CLI::App* solve = app.add_subcommand("solve", "Solve the minimum-time induction problem");
  add_common(solve);
  solve->add_option("--method", method, "shooting | strategy | both");
  CLI::App* simulate = app.add_subcommand("simulate", "Replay a schedule file");
  add_common(simulate);
  simulate->add_option("--schedule", schedule_path, "Schedule JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig config = load_config(config_path);
    if (!method.empty()) config.method = parse_method(method);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (step) config.step = *step;
    config.validate();

    if (params->parsed()) {
      std::cout << cmd_params(config).dump(2) << "\n";
    } else if (solve->parsed()) {
      std::cout << cmd_solve(config).dump(2) << "\n";
    } else {
      std::cout << cmd_simulate(config, schedule_path).dump(2) << "\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NoConvergenceError& e) {
    std::cerr << "solver failure: " << e.what() << " (seeds tried: " << e.seeds_tried() << ")\n";
    return kExitSolver;
  } catch (const InfeasibleError& e) {
    std::cerr << "solver failure: " << e.what() << " (best residual " << e.best_residual() << ")\n";
    return kExitSolver;
  } catch (const IntegrationError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace induction::cli
