#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cglstab/solver.hpp"

using namespace cglstab;

namespace {

const double kPi = std::acos(-1.0);

ComplexField initial_exp1(const Grid& g) {
  ComplexField u(g.n);
  for (int i = 0; i < g.n; ++i)
    u(i) = Complex{std::sin(2.0 * kPi * g.x(i)) - 0.5 * std::sin(3.0 * kPi * g.x(i)), 0.0};
  return u;
}

ComplexField initial_exp2(const Grid& g) {
  ComplexField u(g.n);
  for (int i = 0; i < g.n; ++i)
    u(i) = Complex{2.0 * g.x(i) - 1.0 - std::cos(kPi * g.x(i)),
                   -2.0 * std::sin(2.0 * kPi * g.x(i))};
  return u;
}

ControlLaw make_law(const PhysParams& pp, const Grid& g) {
  const ComplexMatrix K = build_kernel_operator(g, build_kernel_table(pp, g));
  const OperatorMatrix PN = build_projection(g, pp.n_modes);
  const UpsilonResult ups = build_upsilon(pp, g, K);
  return build_control_law(pp, g, PN, ups);
}

} // namespace

TEST_CASE("system boundary rows") {
  const PhysParams pp = experiment1_params();
  const Grid g = Grid::uniform(64, pp.L);
  const TimeGrid tg = TimeGrid::uniform(11, 0.01);
  const SystemMatrices sys = build_system(pp, g, tg);
  const int n = g.n;

  CHECK(sys.lhs.at(0, 0) == Complex{1.0, 0.0});
  CHECK(sys.lhs.at(0, 1) == Complex{0.0, 0.0});
  const double h2 = 2.0 * g.dx;
  CHECK(sys.lhs.at(n - 1, n - 3) == Complex{1.0 / h2, 0.0});
  CHECK(sys.lhs.at(n - 1, n - 2) == Complex{-4.0 / h2, 0.0});
  CHECK(sys.lhs.at(n - 1, n - 1) == Complex{3.0 / h2, 0.0});
  for (int j = 0; j < n; ++j) {
    CHECK(sys.rhs.at(0, j) == Complex{0.0, 0.0});
    CHECK(sys.rhs.at(n - 1, j) == Complex{0.0, 0.0});
  }
  CHECK(sys.plain.at(0, 0) == Complex{1.0, 0.0});
  CHECK(sys.plain.at(n - 1, n - 1) == Complex{1.0, 0.0});
  CHECK(sys.plain.at(n - 1, n - 2) == Complex{0.0, 0.0});
}

TEST_CASE("zero state stays zero") {
  const PhysParams pp = experiment1_params();
  const Grid g = Grid::uniform(101, pp.L);
  const TimeGrid tg = TimeGrid::uniform(21, 0.02);
  const SystemMatrices sys = build_system(pp, g, tg);
  const ComplexField z = ComplexField::Zero(g.n);
  CHECK(step_linear(sys, z, Complex{0.0, 0.0}).cwiseAbs().maxCoeff() == 0.0);

  const RunRecord rec = run(pp, g, tg, z, nullptr, Plant::linear);
  CHECK(rec.l2.maxCoeff() == 0.0);
  CHECK(rec.h1.maxCoeff() == 0.0);
  CHECK(rec.g.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boundary rows hold along a controlled march") {
  const PhysParams pp = experiment1_params();
  const Grid g = Grid::uniform(201, pp.L);
  const TimeGrid tg = TimeGrid::uniform(51, 0.05);
  const SystemMatrices sys = build_system(pp, g, tg);
  const ControlLaw law = make_law(pp, g);
  const double h2 = 2.0 * g.dx;

  ComplexField u = initial_exp1(g);
  for (int step = 0; step < 50; ++step) {
    const Complex gval = feedback(law, g, u);
    u = step_linear(sys, u, gval);
    CHECK(u(0) == Complex{0.0, 0.0});
    const Complex slope = (u(g.n - 3) - 4.0 * u(g.n - 2) + 3.0 * u(g.n - 1)) / h2;
    CHECK(std::abs(slope - gval) < 1e-10 * (1.0 + std::abs(gval)));
  }
}

TEST_CASE("one step damps the first mode by the trapezoidal factor") {
  PhysParams pp;
  pp.nu = 1.0;
  pp.L = 1.0;
  const Grid g = Grid::uniform(201, pp.L);
  const TimeGrid tg = TimeGrid::uniform(2, 1e-3);
  const SystemMatrices sys = build_system(pp, g, tg);

  const ComplexField e1 = eigenfunction(g, 1).cast<Complex>();
  const ComplexField u1 = step_linear(sys, e1, Complex{0.0, 0.0});

  const auto coeff = [&](const ComplexField& u) {
    return (u.array() * e1.array() * g.w.array().cast<Complex>()).sum();
  };
  const double ratio = (coeff(u1) / coeff(e1)).real();
  const double lam1 = eigenvalue(pp, 1);
  const double exact = (1.0 - 0.5 * tg.dt * lam1) / (1.0 + 0.5 * tg.dt * lam1);
  CHECK(std::abs(ratio - exact) < 1e-5);
  CHECK(ratio > 0.0);
  CHECK(ratio < 1.0);
}

TEST_CASE("linear stepper converges at second order in time") {
  const PhysParams pp = experiment1_params();
  const Grid g = Grid::uniform(201, pp.L);
  // Boundary-compatible smooth data: eigenfunctions satisfy both rows
  // exactly. Data with u_x(L) != 0 seeds high modes whose trapezoidal
  // amplification sits near -1 and the clean order is lost.
  const RealMatrix E = eigenbasis(g, 2);
  const ComplexField u0 = E.col(0).cast<Complex>() + Complex{0.3, 0.1} * E.col(1).cast<Complex>();
  const double T = 0.1;

  const auto march = [&](int nt) {
    const TimeGrid tg = TimeGrid::uniform(nt, T);
    return run(pp, g, tg, u0, nullptr, Plant::linear).final_state;
  };
  const ComplexField ref = march(801);
  const double e1 = (march(101) - ref).cwiseAbs().maxCoeff();
  const double e2 = (march(201) - ref).cwiseAbs().maxCoeff();
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.8);
  CHECK(order <= 2.3);
}

TEST_CASE("flat modulus exponent makes the sweep a linear solve") {
  PhysParams pp = experiment2_params();
  const Grid g = Grid::uniform(101, pp.L);
  const TimeGrid tg = TimeGrid::uniform(11, 0.01);
  SystemMatrices sys = build_system(pp, g, tg);
  sys.params.p = 0.0; // diagnostic value, below the validated range

  const ComplexField u = initial_exp2(g);
  const NonlinearStep ns = step_nonlinear(sys, u, nullptr);
  CHECK(ns.iters == 2); // first sweep lands exactly, second certifies
  CHECK(ns.residual < 1e-12);
}

TEST_CASE("zero state needs one nonlinear sweep") {
  const PhysParams pp = experiment2_params();
  const Grid g = Grid::uniform(101, pp.L);
  const TimeGrid tg = TimeGrid::uniform(11, 0.01);
  const SystemMatrices sys = build_system(pp, g, tg);
  const NonlinearStep ns = step_nonlinear(sys, ComplexField::Zero(g.n), nullptr);
  CHECK(ns.iters == 1);
  CHECK(ns.u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("nonlinear stepping rejects the linear model") {
  const PhysParams pp = experiment1_params();
  const Grid g = Grid::uniform(101, pp.L);
  const SystemMatrices sys = build_system(pp, g, TimeGrid::uniform(11, 0.01));
  CHECK_THROWS_AS(step_nonlinear(sys, ComplexField::Zero(g.n), nullptr), DomainError);
}

TEST_CASE("published nonlinear setup stays within its sweep budget") {
  const PhysParams pp = experiment2_params();
  const Grid g = Grid::uniform(201, pp.L);
  const TimeGrid tg = TimeGrid::uniform(3001, 3.0); // dt = 1e-3
  const ControlLaw law = make_law(pp, g);
  const RunRecord rec = run(pp, g, tg, initial_exp2(g), &law, Plant::nonlinear);
  int worst = 0;
  for (int it : rec.picard) worst = std::max(worst, it);
  CHECK(worst <= 8);
  CHECK(worst >= 1);
}

TEST_CASE("singular system surfaces as a solve error") {
  const PhysParams pp = experiment1_params();
  const Grid g = Grid::uniform(64, pp.L);
  SystemMatrices sys = build_system(pp, g, TimeGrid::uniform(11, 0.01));
  sys.lhs.zero_row(5);
  const ComplexField u = initial_exp1(g);
  try {
    step_linear(sys, u, Complex{0.0, 0.0});
    FAIL("expected SolveError");
  } catch (const SolveError& e) {
    CHECK(e.pivot() <= 1e-300);
  }
}

TEST_CASE("step errors carry the step index") {
  const PhysParams pp = experiment2_params();
  const Grid g = Grid::uniform(101, pp.L);
  const TimeGrid tg = TimeGrid::uniform(7, 3.0); // dt = 0.5, far past stability
  const ComplexField u0 = 50.0 * initial_exp2(g);
  try {
    run(pp, g, tg, u0, nullptr, Plant::nonlinear);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("step 0") != std::string::npos);
    CHECK(msg.find("t = 0") != std::string::npos);
  }
}

TEST_CASE("incompatible initial data settles through the boundary row") {
  const PhysParams pp = experiment2_params();
  const Grid g = Grid::uniform(101, pp.L);
  const TimeGrid tg = TimeGrid::uniform(6, 5e-3);
  ComplexField u0 = initial_exp2(g);
  CHECK(std::abs(u0(0) + 2.0) < 1e-14); // the published state has u0(0) = -2

  RunOptions opts;
  opts.snapshot_steps = {0, 1, 3};
  const RunRecord rec = run(pp, g, tg, u0, nullptr, Plant::nonlinear, opts);
  REQUIRE(rec.snapshots.size() == 3);
  CHECK(rec.snapshots[0](0) == u0(0));
  CHECK(rec.snapshots[1](0) == Complex{0.0, 0.0});
  CHECK(rec.snapshots[2](0) == Complex{0.0, 0.0});
  CHECK(rec.final_state(0) == Complex{0.0, 0.0});
}

TEST_CASE("mismatched run inputs are rejected") {
  const PhysParams pp = experiment1_params();
  const Grid g = Grid::uniform(101, pp.L);
  const TimeGrid tg = TimeGrid::uniform(11, 0.01);
  CHECK_THROWS_AS(run(pp, g, tg, ComplexField::Zero(g.n - 1), nullptr, Plant::linear),
                  DimensionError);
  CHECK_THROWS_AS(run(pp, g, tg, ComplexField::Zero(g.n), nullptr, Plant::nonlinear),
                  ConfigError); // kappa = 0 has no nonlinear plant
}

TEST_CASE("histories repeat their last applied value") {
  const PhysParams pp = experiment1_params();
  const Grid g = Grid::uniform(101, pp.L);
  const TimeGrid tg = TimeGrid::uniform(6, 0.005);
  const ControlLaw law = make_law(pp, g);
  const RunRecord rec = run(pp, g, tg, initial_exp1(g), &law, Plant::linear);
  CHECK(rec.g(tg.n - 1) == rec.g(tg.n - 2));
  CHECK(rec.picard[tg.n - 1] == rec.picard[tg.n - 2]);
  CHECK(std::abs(rec.g(0)) > 0.0); // the feedback actually acts
}

TEST_CASE("decay fit on exact exponentials") {
  const int n = 201;
  RealField t(n), clean(n), wobbly(n), plateau(n);
  for (int i = 0; i < n; ++i) {
    t(i) = i * (1.0 / (n - 1));
    clean(i) = 2.0 * std::exp(-3.0 * t(i));
    wobbly(i) = clean(i) * (1.0 + 0.01 * std::sin(40.0 * t(i)));
    plateau(i) = 4.8 * (1.0 + 1e-6 * std::sin(9.0 * t(i)));
  }
  const DecayFit f1 = fit_decay_rate(t, clean, 0.0, 1.0);
  CHECK(f1.rate == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f1.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-10));

  const DecayFit f2 = fit_decay_rate(t, wobbly, 0.0, 1.0);
  CHECK(std::abs(f2.rate - 3.0) < 0.05);

  const DecayFit f3 = fit_decay_rate(t, plateau, 0.1, 0.9);
  CHECK(std::abs(f3.rate) < 0.05);
}

TEST_CASE("decay fit window errors") {
  const int n = 101;
  RealField t(n), norms(n);
  for (int i = 0; i < n; ++i) {
    t(i) = i * 0.01;
    norms(i) = std::exp(-t(i));
  }
  CHECK_THROWS_AS(fit_decay_rate(t, norms, 0.5, 0.5), WindowError);
  CHECK_THROWS_AS(fit_decay_rate(t, norms, 0.8, 0.2), WindowError);
  CHECK_THROWS_AS(fit_decay_rate(t, norms, 0.299, 0.301), WindowError); // one sample only
  norms(50) = 0.0;
  CHECK_THROWS_AS(fit_decay_rate(t, norms, 0.4, 0.6), WindowError);
  RealField shorter = t.head(100);
  CHECK_THROWS_AS(fit_decay_rate(shorter, norms, 0.0, 1.0), DimensionError);
}

TEST_CASE("controlled experiment decays, uncontrolled grows") {
  const PhysParams pp = experiment1_params();
  const Grid g = Grid::uniform(201, pp.L);
  const TimeGrid tg = TimeGrid::uniform(1001, 1.0);
  const ComplexField u0 = initial_exp1(g);

  const ControlLaw law = make_law(pp, g);
  const RunRecord on = run(pp, g, tg, u0, &law, Plant::linear);
  CHECK(on.h1(tg.n - 1) < 1e-4 * on.h1(0));

  const RunRecord off = run(pp, g, tg, u0, nullptr, Plant::linear);
  CHECK(off.h1(tg.n - 1) > 10.0 * off.h1(0));
  // open-loop growth tracks the most unstable mode, gamma - nu lambda_1
  const DecayFit fit = fit_decay_rate(off.t, off.h1, 0.3, 0.9);
  CHECK(std::abs(-fit.rate - (pp.gamma - pp.nu * eigenvalue(pp, 1))) < 0.5);
}
