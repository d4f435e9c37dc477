#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "induction/errors.hpp"
#include "induction/patient_model.hpp"
#include "induction/shooting_solver.hpp"
#include "induction/strategy_solver.hpp"

namespace py = pybind11;
using namespace induction;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Patient PK/PD model and time-optimal induction solvers";

  static py::exception<NoConvergenceError> no_convergence(m, "NoConvergenceError", PyExc_RuntimeError);
  static py::exception<InfeasibleError> infeasible(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const NoConvergenceError& e) {
      py::set_error(no_convergence, e.what());
    } catch (const InfeasibleError& e) {
      py::set_error(infeasible, e.what());
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const DegenerateDemographicsError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const ParameterOutOfRangeError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::enum_<Sex>(m, "Sex").value("male", Sex::male).value("female", Sex::female);

  py::class_<PatientDemographics>(m, "PatientDemographics")
      .def(py::init([](Sex sex, double age, double weight, double height) {
             PatientDemographics d{sex, age, weight, height};
             d.validate();
             return d;
           }),
           py::arg("sex"), py::arg("age"), py::arg("weight"), py::arg("height"))
      .def_readonly("sex", &PatientDemographics::sex)
      .def_readonly("age", &PatientDemographics::age)
      .def_readonly("weight", &PatientDemographics::weight)
      .def_readonly("height", &PatientDemographics::height);

  py::class_<PkpdParameters>(m, "PkpdParameters")
      .def_readonly("a10", &PkpdParameters::a10)
      .def_readonly("a12", &PkpdParameters::a12)
      .def_readonly("a13", &PkpdParameters::a13)
      .def_readonly("a21", &PkpdParameters::a21)
      .def_readonly("a31", &PkpdParameters::a31)
      .def_readonly("ae0", &PkpdParameters::ae0)
      .def_readonly("v1", &PkpdParameters::v1);

  py::class_<BisParameters>(m, "BisParameters")
      .def(py::init([](double bis0, double ec50, double gamma) {
             BisParameters b{bis0, ec50, gamma};
             b.validate();
             return b;
           }),
           py::arg("bis0") = 100.0, py::arg("ec50") = 3.4, py::arg("gamma") = 3.0)
      .def_readonly("bis0", &BisParameters::bis0)
      .def_readonly("ec50", &BisParameters::ec50)
      .def_readonly("gamma", &BisParameters::gamma);

  py::class_<EquilibriumState>(m, "EquilibriumState")
      .def_readonly("x", &EquilibriumState::x)
      .def_readonly("u", &EquilibriumState::u);

  py::class_<LtiSystem>(m, "LtiSystem")
      .def(py::init<const Mat4&, const Vec4&>(), py::arg("A"), py::arg("B"))
      .def_property_readonly("A", &LtiSystem::a)
      .def_property_readonly("B", &LtiSystem::b)
      .def_property_readonly("eigenvalues", &LtiSystem::eigenvalues)
      .def_property_readonly("has_real_spectrum", &LtiSystem::has_real_spectrum);

  m.def("lean_body_mass", &lean_body_mass, py::arg("sex"), py::arg("weight"), py::arg("height"));
  m.def("schnider_parameters", &schnider_parameters, py::arg("demographics"));
  m.def("assemble_system", &assemble_system, py::arg("params"));
  m.def("bis", &bis, py::arg("x4"), py::arg("params") = BisParameters{});
  m.def("bis_inverse", &bis_inverse, py::arg("target_bis"), py::arg("params") = BisParameters{});
  m.def("equilibrium", &equilibrium, py::arg("params"), py::arg("ec50"));

  m.def("expm", py::overload_cast<const LtiSystem&, double>(&expm), py::arg("system"), py::arg("t"));
  m.def("expm_general", &expm_general, py::arg("M"), py::arg("t"));
  m.def("propagate_constant", &propagate_constant, py::arg("system"), py::arg("x0"), py::arg("u"),
        py::arg("dt"));
  m.def("kalman_rank", &kalman_rank, py::arg("system"));

  py::class_<TimeOptimalProblem>(m, "TimeOptimalProblem")
      .def_static("from_equilibrium", &TimeOptimalProblem::from_equilibrium, py::arg("system"),
                  py::arg("equilibrium"), py::arg("u_max"), py::arg("x0") = Vec4::Zero())
      .def_readonly("target_fast", &TimeOptimalProblem::target_fast)
      .def_readonly("u_max", &TimeOptimalProblem::u_max)
      .def_readonly("x0", &TimeOptimalProblem::x0);

  py::class_<ControlSchedule>(m, "ControlSchedule")
      .def(py::init([](std::vector<double> levels, std::vector<double> breakpoints, double t_f) {
             ControlSchedule s{std::move(levels), std::move(breakpoints), t_f};
             s.validate(true);
             return s;
           }),
           py::arg("levels"), py::arg("breakpoints"), py::arg("t_f"))
      .def_readonly("levels", &ControlSchedule::levels)
      .def_readonly("breakpoints", &ControlSchedule::breakpoints)
      .def_readonly("t_f", &ControlSchedule::t_f);

  m.def("schedule_endpoint", &schedule_endpoint, py::arg("system"), py::arg("schedule"),
        py::arg("x0") = Vec4::Zero());

  py::class_<Pattern>(m, "Pattern")
      .def_readonly("strategy", &Pattern::strategy)
      .def("switches", &Pattern::switches)
      .def("__repr__", &Pattern::describe);

  py::class_<StrategyResult>(m, "StrategyResult")
      .def_readonly("pattern", &StrategyResult::pattern)
      .def_readonly("feasible", &StrategyResult::feasible)
      .def_readonly("schedule", &StrategyResult::schedule)
      .def_readonly("residual", &StrategyResult::residual)
      .def_property_readonly("t_f", &StrategyResult::t_f);

  m.def(
      "solve_all_patterns",
      [](const TimeOptimalProblem& prob, bool bolus_filter) {
        StrategyOptions o;
        o.bolus_filter = bolus_filter;
        return solve_all_patterns(prob, o);
      },
      py::arg("problem"), py::arg("bolus_filter") = true);
  m.def(
      "solve_time_optimal",
      [](const TimeOptimalProblem& prob, bool bolus_filter) {
        StrategyOptions o;
        o.bolus_filter = bolus_filter;
        return solve_time_optimal(prob, o);
      },
      py::arg("problem"), py::arg("bolus_filter") = true);

  m.def("bang_control", &bang_control, py::arg("psi1"), py::arg("u_max"));
  m.def("hamiltonian", &hamiltonian, py::arg("problem"), py::arg("x"), py::arg("u"), py::arg("psi"));
  m.def(
      "shooting_residual",
      [](const TimeOptimalProblem& prob, const Vec4& psi0, double t_f) {
        return shooting_residual(prob, psi0, t_f);
      },
      py::arg("problem"), py::arg("psi0"), py::arg("t_f"));

  py::class_<ExtremalCertificate>(m, "ExtremalCertificate")
      .def_readonly("psi0", &ExtremalCertificate::psi0)
      .def_readonly("t_f", &ExtremalCertificate::t_f)
      .def_readonly("switch_times", &ExtremalCertificate::switch_times)
      .def_readonly("residual_norm", &ExtremalCertificate::residual_norm)
      .def_readonly("schedule", &ExtremalCertificate::schedule)
      .def_readonly("seed_index", &ExtremalCertificate::seed_index);

  m.def(
      "solve_shooting",
      [](const TimeOptimalProblem& prob) {
        const std::vector<ShootingSeed> seeds = default_seed_grid();
        py::gil_scoped_release release;
        return solve_shooting(prob, seeds);
      },
      py::arg("problem"));
}
