#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "induction/errors.hpp"
#include "induction/patient_model.hpp"
#include "oracles.hpp"

using namespace induction;
using doctest::Approx;

TEST_SUITE("patient_model") {
  TEST_CASE("lean body mass follows the James formula") {
    // 1.1 * 77 - 128 * (77/177)^2 and 1.07 * 77 - 148 * (77/177)^2 by hand.
    CHECK(lean_body_mass(Sex::male, 77.0, 177.0) == Approx(60.47605414).epsilon(1e-10));
    CHECK(lean_body_mass(Sex::female, 77.0, 177.0) == Approx(54.38106259).epsilon(1e-10));

    // quadratic term vanishes as w/h -> 0
    CHECK(lean_body_mass(Sex::male, 1.0, 1e6) == Approx(1.1).epsilon(1e-9));
  }

  TEST_CASE("lean body mass rejects bad input") {
    CHECK_THROWS_AS(lean_body_mass(Sex::male, 0.0, 177.0), DomainError);
    CHECK_THROWS_AS(lean_body_mass(Sex::female, 70.0, -1.0), DomainError);
    CHECK_THROWS_AS(lean_body_mass(Sex::female, 200.0, 100.0), DegenerateDemographicsError);
  }

  TEST_CASE("Schnider parameters for the reference patient") {
    const PkpdParameters p = schnider_parameters(testing::reference_patient());
    CHECK(std::abs(p.a10 - 0.4195) < 1e-4);
    CHECK(p.a12 == 0.302);
    CHECK(p.a13 == 0.196);
    CHECK(p.a21 == Approx(1.29 / 18.9).epsilon(1e-14));
    CHECK(std::abs(p.a21 - 0.0683) < 1e-4);
    CHECK(p.a31 == 0.0035);
    CHECK(p.ae0 == 0.456);
    CHECK(p.v1 == 4.27);
  }

  TEST_CASE("Schnider parameters outside model validity") {
    CHECK_THROWS_AS(schnider_parameters({Sex::male, 120.0, 77.0, 177.0}), ParameterOutOfRangeError);
    CHECK_THROWS_AS(schnider_parameters({Sex::male, 53.0, 0.0, 177.0}), DomainError);
    CHECK_THROWS_AS(schnider_parameters({Sex::male, -3.0, 77.0, 177.0}), DomainError);
  }

  TEST_CASE("assembled matrix matches the reference patient") {
    const LtiSystem sys = assemble_system(schnider_parameters(testing::reference_patient()));
    Mat4 expected;
    // clang-format off
    expected << -0.9175, 0.0683,  0.0035, 0.0,
                 0.3020, -0.0683, 0.0,    0.0,
                 0.1960, 0.0,     -0.0035, 0.0,
                 0.1068, 0.0,     0.0,    -0.4560;
    // clang-format on
    CHECK((sys.a() - expected).cwiseAbs().maxCoeff() < 1e-4);
    CHECK(sys.a()(3, 0) == Approx(0.456 / 4.27).epsilon(1e-14));
    CHECK(sys.b() == Vec4::UnitX());
  }

  TEST_CASE("sign structure of A for random parameters") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
      const Mat4 a = assemble_system(testing::random_parameters(rng)).a();
      for (int i = 0; i < 4; ++i) {
        CHECK(a(i, i) < 0.0);
        for (int j = 0; j < 4; ++j)
          if (i != j) CHECK(a(i, j) >= 0.0);
      }
    }
  }

  TEST_CASE("parameters and spectrum over the demographic box") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> age(20.0, 80.0), weight(45.0, 120.0), height(150.0, 200.0);
    for (int trial = 0; trial < 400; ++trial) {
      const PatientDemographics d{trial % 2 ? Sex::male : Sex::female, age(rng), weight(rng), height(rng)};
      const PkpdParameters p = schnider_parameters(d);
      CHECK(p.a10 > 0.0);
      CHECK(p.a12 > 0.0);
      CHECK(p.a21 > 0.0);
      const Eigen::Vector4cd ev = Eigen::EigenSolver<Mat4>(assemble_system(p).a()).eigenvalues();
      CHECK(ev.imag().cwiseAbs().maxCoeff() < 1e-10);
      CHECK(ev.real().maxCoeff() < 0.0);
    }
  }

  TEST_CASE("bis examples") {
    CHECK(bis(0.0) == 100.0);
    CHECK(bis(3.4) == Approx(50.0).epsilon(1e-14));
    CHECK(bis(6.8) == Approx(100.0 / 9.0).epsilon(1e-14));
    CHECK_THROWS_AS(bis(-0.1), DomainError);
  }

  TEST_CASE("bis is strictly decreasing") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> x(0.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
      double lo = x(rng), hi = x(rng);
      if (lo == hi) continue;
      if (lo > hi) std::swap(lo, hi);
      CHECK(bis(hi) < bis(lo));
    }
  }

  TEST_CASE("bis_inverse") {
    CHECK(bis_inverse(50.0) == Approx(3.4).epsilon(1e-14));
    CHECK(bis_inverse(100.0 / 9.0) == Approx(6.8).epsilon(1e-12));
    for (double b : {10.0, 30.0, 50.0, 70.0, 90.0}) {
      CHECK(std::abs(bis(bis_inverse(b)) - b) <= 1e-12 * b);
    }
    CHECK_THROWS_AS(bis_inverse(0.0), DomainError);
    CHECK_THROWS_AS(bis_inverse(100.0), DomainError);
    CHECK_THROWS_AS(bis_inverse(120.0), DomainError);
  }

  TEST_CASE("equilibrium of the reference patient") {
    const PkpdParameters p = schnider_parameters(testing::reference_patient());
    const EquilibriumState eq = equilibrium(p, 3.4);
    CHECK(std::abs(eq.x(0) - 14.518) < 1e-3);
    CHECK(std::abs(eq.x(1) - 64.2371) < 1e-3);
    CHECK(std::abs(eq.x(2) - 813.008) < 1e-3);
    CHECK(eq.x(3) == 3.4);
    CHECK(std::abs(eq.u - 6.0907) < 1e-4);

    const EquilibriumState zero = equilibrium(p, 0.0);
    CHECK(zero.x.isZero(0.0));
    CHECK(zero.u == 0.0);
  }

  TEST_CASE("equilibrium residual for random parameters") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
      const PkpdParameters p = testing::random_parameters(rng);
      const LtiSystem sys = assemble_system(p);
      const EquilibriumState eq = equilibrium(p, 3.4);
      const Vec4 r = sys.a() * eq.x + sys.b() * eq.u;
      CHECK(r.cwiseAbs().maxCoeff() < 1e-12);
      CHECK(eq.x(3) == 3.4);
    }
  }
}
