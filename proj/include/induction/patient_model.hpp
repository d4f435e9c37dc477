#pragma once

#include <string_view>

#include "induction/lti_core.hpp"

namespace induction {

enum class Sex { male, female };

Sex parse_sex(std::string_view text);
std::string_view to_string(Sex sex);

// Units: years, kg, cm.
struct PatientDemographics {
  Sex sex = Sex::male;
  double age = 0.0;
  double weight = 0.0;
  double height = 0.0;

  // Throws DomainError unless age, weight and height are positive.
  void validate() const;
};

// Rate constants in 1/min, central volume in L.
struct PkpdParameters {
  double a10 = 0.0;
  double a12 = 0.0;
  double a13 = 0.0;
  double a21 = 0.0;
  double a31 = 0.0;
  double ae0 = 0.0;
  double v1 = 0.0;

  // Throws ParameterOutOfRangeError naming the first non-positive field.
  void validate() const;
};

struct BisParameters {
  double bis0 = 100.0;
  double ec50 = 3.4;  // mg/L
  double gamma = 3.0;

  void validate() const;
};

// Steady state with x4 pinned to the effect-site target.
struct EquilibriumState {
  Vec4 x = Vec4::Zero();  // mg
  double u = 0.0;         // mg/min
};

/// James formula, weight in kg and height in cm.
double lean_body_mass(Sex sex, double weight, double height);

/// Schnider regression. a13, a31, ae0 and v1 are population constants; a10
/// depends on weight, height and LBM, a12 and a21 on age.
PkpdParameters schnider_parameters(const PatientDemographics& demo);

/// Four-compartment model (central, muscle, fat, effect site) with the
/// infusion entering the central compartment.
LtiSystem assemble_system(const PkpdParameters& p);

// Decreasing Hill sigmoid of the effect-site level.
double bis(double x4, const BisParameters& bp = {});

// Effect-site level giving the requested BIS; target must lie in (0, bis0).
double bis_inverse(double target_bis, const BisParameters& bp = {});

// Equilibrium holding x4 at the given effect-site level.
EquilibriumState equilibrium(const PkpdParameters& p, double ec50);

}  // namespace induction
