#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "induction/patient_model.hpp"
#include "induction/problem.hpp"

namespace induction::cli {

enum class Method { shooting, strategy, both };

Method parse_method(const std::string& text);

// Exit status contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  PatientDemographics demographics;
  BisParameters bis;
  double bis_target = 50.0;
  std::optional<double> u_max;  // mg/min, required by solve
  Method method = Method::both;
  std::filesystem::path out_dir = ".";
  double step = 0.001;          // min
  std::optional<Vec4> x0;       // mg, defaults to the wake state

  void validate() const;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

// Patient model resolved from a config.
struct ResolvedPatient {
  PkpdParameters params;
  LtiSystem system;
  EquilibriumState equilibrium;
  double lbm;
};
ResolvedPatient resolve(const RunConfig& config);

// Problem for `solve`; ConfigError when u_max is missing or does not exceed u_e.
TimeOptimalProblem build_problem(const RunConfig& config, const ResolvedPatient& patient);

// Rounds to 10 significant digits for emission.
double emit(double v);

nlohmann::json schedule_to_json(const ControlSchedule& schedule, const Vec4& endpoint);
ControlSchedule schedule_from_json(const nlohmann::json& doc);

/// CSV with header t,x1,x2,x3,x4,u,bis sampled every `step` minutes and at t_f,
/// states from exact piecewise propagation.
std::string trajectory_csv(const LtiSystem& sys, const Vec4& x0, const ControlSchedule& schedule,
                           double step, const BisParameters& bp);

nlohmann::json cmd_params(const RunConfig& config);

// Writes <method>_schedule.json, <method>_trajectory.csv and, for both
// methods, comparison.json into config.out_dir. Returns a summary.
nlohmann::json cmd_solve(const RunConfig& config);

// Replays a schedule file into <out_dir>/trajectory.csv; returns the endpoint record.
nlohmann::json cmd_simulate(const RunConfig& config, const std::filesystem::path& schedule_path);

// Full command-line entry point; returns the process exit status.
int run(int argc, char** argv);

}  // namespace induction::cli
