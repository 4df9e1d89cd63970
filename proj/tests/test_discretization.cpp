#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "cglstab/discretization.hpp"

using namespace cglstab;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_CASE("grid endpoints are exact") {
  const Grid g = Grid::uniform(37, 0.7);
  CHECK(g.x(0) == 0.0);
  CHECK(g.x(36) == 0.7);
  CHECK(g.dx == doctest::Approx(0.7 / 36).epsilon(1e-15));

  const TimeGrid tg = TimeGrid::uniform(11, 0.3);
  CHECK(tg.t(0) == 0.0);
  CHECK(tg.t(10) == 0.3);
  CHECK(tg.dt * (tg.n - 1) == doctest::Approx(0.3).epsilon(1e-15));

  CHECK_THROWS_AS(Grid::uniform(2, 1.0), ConfigError);
  CHECK_THROWS_AS(Grid::uniform(11, 0.0), ConfigError);
  CHECK_THROWS_AS(TimeGrid::uniform(1, 1.0), ConfigError);
}

TEST_CASE("trapz is exact on constants and linears") {
  const Grid g11 = Grid::uniform(11, 1.0);
  CHECK(trapz(g11, RealField(RealField::Ones(11))) == 1.0);
  const Grid g57 = Grid::uniform(57, 1.0);
  CHECK(trapz(g57, RealField(g57.x)) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("trapz of sin(pi x) on [0,1]") {
  const Grid g = Grid::uniform(201, 1.0);
  RealField f(g.n);
  for (int i = 0; i < g.n; ++i) f(i) = std::sin(kPi * g.x(i));
  CHECK(trapz(g, f) == doctest::Approx(2.0 / kPi).epsilon(1e-4));
}

TEST_CASE("trapz is linear in the integrand") {
  const Grid g = Grid::uniform(101, 1.0);
  const ComplexField f = random_mode_field(g, 5, 1);
  const ComplexField h = random_mode_field(g, 5, 2);
  const Complex a{0.3, -1.7}, b{-2.1, 0.4};
  const Complex lhs = trapz(g, ComplexField(a * f + b * h));
  const Complex rhs = a * trapz(g, f) + b * trapz(g, h);
  CHECK(std::abs(lhs - rhs) < 1e-13);
}

TEST_CASE("trapz length mismatch") {
  const Grid g = Grid::uniform(11, 1.0);
  CHECK_THROWS_AS(trapz(g, RealField(RealField::Ones(10))), DimensionError);
}

TEST_CASE("trapz converges at second order") {
  auto err = [](int n) {
    const Grid g = Grid::uniform(n, 1.0);
    RealField f(g.n);
    for (int i = 0; i < g.n; ++i) f(i) = std::exp(g.x(i));
    return std::abs(trapz(g, f) - (std::exp(1.0) - 1.0));
  };
  const double r1 = err(51) / err(101);
  const double r2 = err(101) / err(201);
  CHECK(r1 == doctest::Approx(4.0).epsilon(0.2));
  CHECK(r2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("norm_l2 basics") {
  const Grid g = Grid::uniform(101, 1.0);
  CHECK(norm_l2(g, ComplexField(ComplexField::Zero(g.n))) == 0.0);
  CHECK(norm_l2(g, ComplexField(ComplexField::Ones(g.n))) == doctest::Approx(1.0).epsilon(1e-15));

  const Grid g4 = Grid::uniform(401, 1.0);
  ComplexField s(g4.n);
  for (int i = 0; i < g4.n; ++i) s(i) = std::sin(2.0 * kPi * g4.x(i));
  CHECK(norm_l2(g4, s) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-4));
}

TEST_CASE("norm_l2 triangle inequality and homogeneity") {
  const Grid g = Grid::uniform(101, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexField f = random_mode_field(g, 8, 10 + seed);
    const ComplexField h = random_mode_field(g, 8, 200 + seed);
    CHECK(norm_l2(g, ComplexField(f + h)) <= norm_l2(g, f) + norm_l2(g, h) + 1e-12);
    const Complex a{-1.25, 0.75};
    CHECK(norm_l2(g, ComplexField(a * f)) ==
          doctest::Approx(std::abs(a) * norm_l2(g, f)).epsilon(1e-12));
  }
}

TEST_CASE("norm_h1 on closed forms") {
  const Grid g = Grid::uniform(101, 1.0);
  CHECK(norm_h1(g, ComplexField(ComplexField::Zero(g.n))) == 0.0);

  // f = x: |f|^2 integrates to 1/3 and f' = 1; the trapezoid value of
  // x^2 carries an h^2/6 excess, so the tolerance sits at that order
  CHECK(norm_h1(g, ComplexField(g.x.cast<Complex>())) ==
        doctest::Approx(std::sqrt(1.0 / 3.0 + 1.0)).epsilon(1e-4));

  const Grid g4 = Grid::uniform(401, 1.0);
  ComplexField f(g4.n);
  for (int i = 0; i < g4.n; ++i) f(i) = std::sin(0.5 * kPi * g4.x(i));
  const double c = 0.25 * kPi * kPi;
  CHECK(norm_h1(g4, f) == doctest::Approx(std::sqrt(0.5 + 0.5 * c)).epsilon(1e-3));
}

TEST_CASE("derivative is exact on affine fields, second order on smooth ones") {
  const Grid g = Grid::uniform(41, 1.0);
  ComplexField f(g.n);
  for (int i = 0; i < g.n; ++i) f(i) = Complex{2.0, -1.0} * g.x(i) + Complex{0.5, 0.25};
  const ComplexField d = derivative(g, f);
  for (int i = 0; i < g.n; ++i) CHECK(std::abs(d(i) - Complex{2.0, -1.0}) < 1e-13);

  auto derr = [](int n) {
    const Grid gg = Grid::uniform(n, 1.0);
    ComplexField s(gg.n);
    for (int i = 0; i < gg.n; ++i) s(i) = std::sin(3.0 * gg.x(i));
    const ComplexField ds = derivative(gg, s);
    double worst = 0.0;
    for (int i = 0; i < gg.n; ++i)
      worst = std::max(worst, std::abs(ds(i) - 3.0 * std::cos(3.0 * gg.x(i))));
    return worst;
  };
  CHECK(derr(51) / derr(101) == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("random_mode_field is deterministic and boundary compatible") {
  const Grid g = Grid::uniform(101, 1.0);
  const ComplexField a = random_mode_field(g, 6, 42);
  const ComplexField b = random_mode_field(g, 6, 42);
  const ComplexField c = random_mode_field(g, 6, 43);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - c).cwiseAbs().maxCoeff() > 1e-6);
  CHECK(std::abs(a(0)) == 0.0); // every mode vanishes at x = 0
}

TEST_CASE("parameter validation") {
  PhysParams p = experiment1_params();
  p.validate();
  p = experiment2_params();
  p.validate();

  p = experiment1_params();
  p.nu = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = experiment1_params();
  p.beta = 1.0; // kappa = 0 forbids dispersion in the nonlinear term
  CHECK_THROWS_AS(p.validate(), ConfigError);

  p = experiment2_params();
  p.p = 4.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
