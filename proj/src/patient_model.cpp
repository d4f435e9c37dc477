#include "induction/patient_model.hpp"

#include <cmath>
#include <string>

#include "induction/errors.hpp"

namespace induction {

Sex parse_sex(std::string_view text) {
  if (text == "male" || text == "m" || text == "M") return Sex::male;
  if (text == "female" || text == "f" || text == "F") return Sex::female;
  throw DomainError("unknown sex '" + std::string(text) + "' (expected male or female)");
}

std::string_view to_string(Sex sex) { return sex == Sex::male ? "male" : "female"; }

void PatientDemographics::validate() const {
  if (!(age > 0.0) || !std::isfinite(age)) throw DomainError("age must be positive");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw DomainError("weight must be positive");
  if (!(height > 0.0) || !std::isfinite(height)) throw DomainError("height must be positive");
}

void PkpdParameters::validate() const {
  const std::pair<const char*, double> fields[] = {{"a10", a10}, {"a12", a12}, {"a13", a13},
                                                   {"a21", a21}, {"a31", a31}, {"ae0", ae0},
                                                   {"v1", v1}};
  for (const auto& [name, value] : fields) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ParameterOutOfRangeError(std::string(name) + " = " + std::to_string(value) +
                                     " is not positive; demographics outside model validity");
    }
  }
}

void BisParameters::validate() const {
  if (!(bis0 > 0.0) || !(ec50 > 0.0) || !(gamma > 0.0)) {
    throw DomainError("BIS parameters bis0, ec50 and gamma must be positive");
  }
}

double lean_body_mass(Sex sex, double weight, double height) {
  if (!(weight > 0.0)) throw DomainError("lean_body_mass: weight must be positive");
  if (!(height > 0.0)) throw DomainError("lean_body_mass: height must be positive");
  const double ratio = weight / height;
  const double lbm = sex == Sex::male ? 1.1 * weight - 128.0 * ratio * ratio
                                      : 1.07 * weight - 148.0 * ratio * ratio;
  if (!(lbm > 0.0)) {
    throw DegenerateDemographicsError("James formula gives non-positive lean body mass " +
                                      std::to_string(lbm) + " kg");
  }
  return lbm;
}

PkpdParameters schnider_parameters(const PatientDemographics& demo) {
  demo.validate();
  const double lbm = lean_body_mass(demo.sex, demo.weight, demo.height);
  const double age_dev = demo.age - 53.0;

  PkpdParameters p;
  p.a10 = 0.443 + 0.0107 * (demo.weight - 77.0) - 0.0159 * (lbm - 59.0) +
          0.0062 * (demo.height - 177.0);
  p.a12 = 0.302 - 0.0056 * age_dev;
  p.a13 = 0.196;
  p.a21 = (1.29 - 0.024 * age_dev) / (18.9 - 0.391 * age_dev);
  p.a31 = 0.0035;
  p.ae0 = 0.456;
  p.v1 = 4.27;
  p.validate();
  return p;
}

LtiSystem assemble_system(const PkpdParameters& p) {
  p.validate();
  Mat4 a;
  // clang-format off
  a << -(p.a10 + p.a12 + p.a13), p.a21,   p.a31,   0.0,
       p.a12,                    -p.a21,  0.0,     0.0,
       p.a13,                    0.0,     -p.a31,  0.0,
       p.ae0 / p.v1,             0.0,     0.0,     -p.ae0;
  // clang-format on
  return LtiSystem(a, Vec4::UnitX());
}

double bis(double x4, const BisParameters& bp) {
  bp.validate();
  if (!(x4 >= 0.0)) throw DomainError("bis: effect-site level must be non-negative");
  const double num = std::pow(x4, bp.gamma);
  return bp.bis0 * (1.0 - num / (num + std::pow(bp.ec50, bp.gamma)));
}

double bis_inverse(double target_bis, const BisParameters& bp) {
  bp.validate();
  if (!(target_bis > 0.0) || !(target_bis < bp.bis0)) {
    throw DomainError("bis_inverse: target must lie strictly between 0 and bis0");
  }
  return bp.ec50 * std::pow((bp.bis0 - target_bis) / target_bis, 1.0 / bp.gamma);
}

EquilibriumState equilibrium(const PkpdParameters& p, double ec50) {
  p.validate();
  if (!(ec50 >= 0.0)) throw DomainError("equilibrium: effect-site level must be non-negative");
  EquilibriumState eq;
  const double central = p.v1 * ec50;
  eq.x << central, p.a12 * central / p.a21, p.a13 * central / p.a31, ec50;
  eq.u = p.a10 * central;
  return eq;
}

}  // namespace induction
