#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "cglstab/controller.hpp"

using namespace cglstab;

namespace {

ControlLaw make_law(const PhysParams& pp, const Grid& g) {
  const ComplexMatrix K = build_kernel_operator(g, build_kernel_table(pp, g));
  const OperatorMatrix PN = build_projection(g, pp.n_modes);
  const UpsilonResult ups = build_upsilon(pp, g, K);
  return build_control_law(pp, g, PN, ups);
}

} // namespace

TEST_CASE("boundary gain values") {
  const Grid g1 = Grid::uniform(101, 1.0);
  const ControlLaw l1 = make_law(experiment1_params(), g1);
  CHECK(l1.zeta.real() == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(l1.zeta.imag() == doctest::Approx(9.0).epsilon(1e-12));

  const ControlLaw l2 = make_law(experiment2_params(), g1);
  CHECK(l2.zeta.real() == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(l2.zeta.imag() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("feedback degenerate cases") {
  const Grid g = Grid::uniform(101, 1.0);
  const ControlLaw law = make_law(experiment1_params(), g);
  CHECK(std::abs(feedback(law, g, ComplexField::Zero(g.n))) == 0.0);

  PhysParams off = experiment1_params();
  off.mu = 0.0;
  const ControlLaw dead = make_law(off, g);
  const ComplexField u = random_mode_field(g, 6, 21);
  CHECK(std::abs(feedback(dead, g, u)) == 0.0);

  CHECK_THROWS_AS(feedback(law, g, ComplexField::Zero(g.n - 1)), DimensionError);
}

TEST_CASE("feedback is linear") {
  const Grid g = Grid::uniform(201, 1.0);
  const ControlLaw law = make_law(experiment1_params(), g);
  const ComplexField u = random_mode_field(g, 8, 31);
  const ComplexField v = random_mode_field(g, 8, 32);
  const Complex a{0.7, -1.3}, b{-0.4, 0.9};
  const Complex lhs = feedback(law, g, a * u + b * v);
  const Complex rhs = a * feedback(law, g, u) + b * feedback(law, g, v);
  const double scale = 1.0 + std::abs(rhs);
  CHECK(std::abs(lhs - rhs) < 1e-12 * scale);
}

TEST_CASE("feedback sees only the projected state") {
  const Grid g = Grid::uniform(201, 1.0);
  const PhysParams pp = experiment1_params();
  const ControlLaw law = make_law(pp, g);
  const OperatorMatrix PN = build_projection(g, pp.n_modes);
  for (std::uint64_t seed = 40; seed < 45; ++seed) {
    const ComplexField u = random_mode_field(g, 8, seed);
    const ComplexField pu = PN.m * u;
    const double scale = 1.0 + std::abs(feedback(law, g, u));
    CHECK(std::abs(feedback(law, g, u) - feedback(law, g, pu)) < 1e-8 * scale);
  }
}

TEST_CASE("feedback is a bounded functional") {
  const Grid g = Grid::uniform(101, 1.0);
  const ControlLaw law = make_law(experiment2_params(), g);
  double c = 0.0;
  for (std::uint64_t seed = 100; seed < 600; ++seed) {
    const ComplexField u = random_mode_field(g, 8, seed);
    c = std::max(c, std::abs(feedback(law, g, u)) / norm_l2(g, u));
  }
  CHECK(c > 0.0);
  for (std::uint64_t seed = 600; seed < 1100; ++seed) {
    const ComplexField u = random_mode_field(g, 8, seed);
    CHECK(std::abs(feedback(law, g, u)) <= 1.2 * c * norm_l2(g, u));
  }
}

TEST_CASE("instability level counts the unstable modes") {
  PhysParams pp = experiment1_params();
  CHECK(instability_level(pp) == 2);
  CHECK(instability_level(experiment2_params()) == 1);
  pp.gamma = 0.0;
  CHECK(instability_level(pp) == 0);
  pp.gamma = 200.0; // just above the fifth eigenvalue, 199.86
  CHECK(instability_level(pp) == 5);
}

TEST_CASE("prescribed-gain plan picks the smallest admissible mode count") {
  const RatePlan p2 = rapid_plan(experiment2_params());
  CHECK(p2.mode == RateMode::rapid);
  CHECK(p2.n_modes == 1);
  CHECK(p2.instability_level == 1);
  CHECK(p2.eta == doctest::Approx(0.4674011002723395).epsilon(1e-12));

  const RatePlan p1 = rapid_plan(experiment1_params());
  CHECK(p1.n_modes == 6);

  // N is the smallest integer strictly above both thresholds
  for (const PhysParams& pp : {experiment1_params(), experiment2_params()}) {
    const double lam1 = eigenvalue(pp, 1);
    const double b1 = pp.mu / (4.0 * pp.nu * lam1) - 0.5;
    const double b2 = pp.mu / (2.0 * (pp.mu + pp.nu * lam1 - pp.gamma)) - 0.5;
    const double bound = std::max(b1, b2);
    const int N = make_rate_plan(pp, RateMode::rapid).n_modes;
    CHECK(N > bound);
    CHECK(N - 1 <= bound);
  }
}

TEST_CASE("prescribed-gain plan near a threshold crossing") {
  PhysParams pp;
  pp.nu = 1.0;
  pp.gamma = 0.0;
  pp.L = 1.0;
  const double lam1 = eigenvalue(pp, 1);
  int prev = 0;
  for (double f : {5.9, 6.0, 6.1}) {
    pp.mu = f * lam1; // first threshold sits at mu = 6 lambda_1
    const RatePlan plan = rapid_plan(pp);
    const double bound =
        std::max(pp.mu / (4.0 * lam1) - 0.5, pp.mu / (2.0 * (pp.mu + lam1)) - 0.5);
    CHECK(plan.n_modes > bound);
    CHECK(plan.n_modes - 1 <= bound);
    CHECK(plan.n_modes >= prev);
    prev = plan.n_modes;
  }
  pp.mu = 5.9 * lam1;
  CHECK(rapid_plan(pp).n_modes == 1);
  pp.mu = 6.1 * lam1;
  CHECK(rapid_plan(pp).n_modes == 2);
}

TEST_CASE("prescribed-gain plan degenerate and invalid inputs") {
  PhysParams pp;
  pp.nu = 1.0;
  pp.gamma = 0.0;
  pp.L = 1.0;
  pp.mu = eigenvalue(pp, 1); // small gain still controls one mode
  CHECK(rapid_plan(pp).n_modes == 1);

  pp.mu = 0.0;
  const RatePlan idle = rapid_plan(pp);
  CHECK(idle.n_modes == 1);
  CHECK(idle.eta == doctest::Approx(pp.nu * eigenvalue(pp, 1)).epsilon(1e-15));

  pp = experiment1_params();
  pp.mu = 20.0; // below gamma - nu lambda_1 = 20.53
  CHECK_THROWS_AS(rapid_plan(pp), InvalidRateError);
  try {
    rapid_plan(pp);
  } catch (const InvalidRateError& e) {
    CHECK(std::string(e.category()) == "rate");
  }
}

TEST_CASE("minimal plan reproduces the published interval") {
  const RatePlan plan = minimal_plan(experiment1_params());
  CHECK(plan.mode == RateMode::minimal);
  CHECK(plan.n_modes == 2);
  CHECK(plan.instability_level == 2);
  CHECK(plan.mu_lower == doctest::Approx(51.33149724931915).epsilon(1e-12));
  CHECK(plan.mu_upper == doctest::Approx(123.37005501361698).epsilon(1e-12));
  CHECK(plan.eta == doctest::Approx(8.2674011002723375).epsilon(1e-12));
  CHECK(predicted_eta(plan) == plan.eta);
}

TEST_CASE("minimal plan rejects gains outside the interval") {
  // the second published configuration is valid only in prescribed-gain
  // form: mu = 12 sits below its minimal interval (22.6, 44.4)
  CHECK_THROWS_AS(minimal_plan(experiment2_params()), InvalidRateError);
  try {
    minimal_plan(experiment2_params());
  } catch (const InvalidRateError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("22.59") != std::string::npos);
    CHECK(msg.find("44.41") != std::string::npos);
  }

  PhysParams pp = experiment1_params();
  pp.mu = 51.0; // just below the lower edge
  CHECK_THROWS_AS(minimal_plan(pp), InvalidRateError);
  pp.mu = 124.0; // just above the upper edge
  CHECK_THROWS_AS(minimal_plan(pp), InvalidRateError);
  pp.mu = 52.0;
  CHECK_NOTHROW(minimal_plan(pp));
}

TEST_CASE("minimal plan with no unstable modes") {
  PhysParams pp;
  pp.nu = 1.0;
  pp.gamma = 0.0;
  pp.L = 1.0;
  pp.mu = 2.0;
  const RatePlan plan = minimal_plan(pp);
  CHECK(plan.n_modes == 0);
  CHECK(std::isinf(plan.mu_lower));
  CHECK(plan.mu_lower < 0.0);
  CHECK(plan.mu_upper == doctest::Approx(2.0 * eigenvalue(pp, 1)).epsilon(1e-12));
  CHECK(plan.eta == doctest::Approx(eigenvalue(pp, 1)).epsilon(1e-15));

  pp.gamma = pp.nu * eigenvalue(pp, 1); // marginal mode: predicted rate hits zero
  pp.mu = 1.0;
  CHECK_THROWS_AS(minimal_plan(pp), InvalidRateError);
}

TEST_CASE("rate plan report layout") {
  std::ostringstream min_os;
  rate_plan_report(min_os, minimal_plan(experiment1_params()));
  const std::string min_txt = min_os.str();
  CHECK(min_txt.find("mode: minimal") != std::string::npos);
  CHECK(min_txt.find("instability_level: 2") != std::string::npos);
  CHECK(min_txt.find("n_modes: 2") != std::string::npos);
  CHECK(min_txt.find("mu_interval: (51.33") != std::string::npos);
  CHECK(min_txt.find("predicted_eta: 8.267") != std::string::npos);

  std::ostringstream rap_os;
  rate_plan_report(rap_os, rapid_plan(experiment2_params()));
  const std::string rap_txt = rap_os.str();
  CHECK(rap_txt.find("mode: rapid") != std::string::npos);
  CHECK(rap_txt.find("mu_interval") == std::string::npos);
  CHECK(rap_txt.find("predicted_eta: 0.467") != std::string::npos);
}
