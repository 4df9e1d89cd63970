#pragma once

#include <memory>
#include <vector>

#include "cglstab/banded.hpp"
#include "cglstab/controller.hpp"

namespace cglstab {

// Crank-Nicolson system for  u_t + A u = nonlinearity + boundary data,
// A = -(nu + i alpha) D2 - gamma I  on interior nodes. Boundary rows:
// row 0 is the Dirichlet identity row, row n-1 the second-order
// one-sided Neumann stencil (3 u_{n-1} - 4 u_{n-2} + u_{n-3})/(2 dx).
//
// lhs:   I + dt/2 A interior, boundary rows as above.
// rhs:   I - dt/2 A interior, boundary rows zeroed (their data enters
//        through the step's dirichlet/neumann arguments).
// plain: I + dt/2 A interior, identity boundary rows; used by the
//        nonlinear residual.
struct SystemMatrices {
  Grid grid;
  TimeGrid tgrid;
  PhysParams params;
  BandedMatrix lhs;
  BandedMatrix rhs;
  BandedMatrix plain;
  mutable std::shared_ptr<const BandedLU> lu; // factored on first linear step
};

SystemMatrices build_system(const PhysParams& pp, const Grid& g, const TimeGrid& tg);

// One linear step. Throws SolveError (pivot magnitude) if the system is
// singular.
ComplexField step_linear(const SystemMatrices& sys, const ComplexField& u, Complex neumann,
                         Complex dirichlet = Complex{0.0, 0.0});

inline constexpr int kPicardCap = 50;
inline constexpr double kPicardTol = 1e-10;

struct NonlinearStep {
  ComplexField u;
  int iters = 0;         // Picard sweeps used
  double residual = 0.0; // last max |du|
  Complex g;             // boundary feedback actually applied
};

// One Picard-iterated step of the semilinear model (kappa > 0 required,
// p = 0 sweeps converge immediately and are allowed for diagnostics).
// The correction form solves for du = u^{s+1} - u^s with the modulus
// factor |u^s|^p frozen per sweep; the feedback (when law != nullptr)
// is refreshed from u^s each sweep. Stops at max |du| < kPicardTol;
// exhausting kPicardCap throws NonConvergenceError with the last
// residual.
NonlinearStep step_nonlinear(const SystemMatrices& sys, const ComplexField& u,
                             const ControlLaw* law);

enum class Plant { linear, nonlinear };

struct RunOptions {
  std::vector<int> snapshot_steps; // time indices whose states to keep
};

// Per-step histories, all of length n_t. g(i) and picard(i) describe the
// step leaving node i; the final node repeats the last applied values.
struct RunRecord {
  RealField t;
  RealField l2;
  RealField h1;
  ComplexField g;
  std::vector<int> picard;
  ComplexField final_state;
  std::vector<ComplexField> snapshots; // parallel to RunOptions::snapshot_steps
};

// Marches the full horizon. law == nullptr runs the uncontrolled model
// (g = 0). Note the Dirichlet row forces u(0) = 0 from the first step
// even if u0(0) != 0; incompatible initial states are accepted on
// purpose (the published nonlinear experiment uses one) and settle
// through a one-step boundary layer. Errors from individual steps are
// rethrown with the step index and time attached.
RunRecord run(const PhysParams& pp, const Grid& g, const TimeGrid& tg, const ComplexField& u0,
              const ControlLaw* law, Plant plant, const RunOptions& opts = {});

struct DecayFit {
  double rate = 0.0;      // decay rate, minus the log-norm slope
  double intercept = 0.0; // fitted log-norm at t = 0
};

// Least-squares line through (t, log norms(t)) restricted to t in
// [t0, t1]. Throws WindowError for an empty/degenerate window or
// nonpositive norms inside it.
DecayFit fit_decay_rate(const RealField& t, const RealField& norms, double t0, double t1);

} // namespace cglstab
