#include "cglstab/controller.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "cglstab/csvio.hpp"
#include "cglstab/kernel.hpp"

namespace cglstab {

ControlLaw build_control_law(const PhysParams& pp, const Grid& g, const OperatorMatrix& PN,
                             const UpsilonResult& ups) {
  require_admissible(ups);
  if (PN.kind != OpKind::PN) throw DomainError("build_control_law expects a PN operator");
  ControlLaw law;
  law.n_modes = pp.n_modes;
  law.zeta = -pp.mu * pp.L / (2.0 * pp.diffusion());
  law.deriv_trace = deriv_trace(pp, g);
  law.gamma_matrix = PN.m - PN.m * ups.upsilon.m;
  return law;
}

Complex feedback(const ControlLaw& law, const Grid& g, const ComplexField& u) {
  if (u.size() != g.n) throw DimensionError("feedback: field length does not match grid");
  const ComplexField v = law.gamma_matrix * u;
  const Complex quad =
      (law.deriv_trace.array() * v.array() * g.w.array().cast<Complex>()).sum();
  return quad + law.zeta * v(g.n - 1);
}

int instability_level(const PhysParams& pp) {
  int m = 0;
  while (pp.nu * eigenvalue(pp, m + 1) < pp.gamma) ++m;
  return m;
}

RatePlan rapid_plan(const PhysParams& pp) {
  const double lam1 = eigenvalue(pp, 1);
  const double margin = pp.mu + pp.nu * lam1 - pp.gamma;
  if (!(margin > 0.0))
    throw InvalidRateError("rapid plan needs mu > gamma - nu lambda_1 (deficit " +
                           fmt_g17(-margin) + ")");
  const double b1 = pp.mu / (4.0 * pp.nu * lam1) - 0.5;
  const double b2 = pp.mu / (2.0 * margin) - 0.5;
  const double bound = std::max(b1, b2);
  // smallest integer strictly above the bound, never below 1
  int N = static_cast<int>(std::floor(bound)) + 1;
  if (!(bound < N)) ++N; // bound landed on an integer
  if (N < 1) N = 1;

  RatePlan plan;
  plan.mode = RateMode::rapid;
  plan.mu = pp.mu;
  plan.n_modes = N;
  plan.instability_level = instability_level(pp);
  plan.eta = pp.nu * lam1 - pp.gamma + pp.mu * (1.0 - 1.0 / (2.0 * N + 1.0));
  plan.mu_lower = std::numeric_limits<double>::quiet_NaN();
  plan.mu_upper = std::numeric_limits<double>::quiet_NaN();
  if (!(plan.eta > 0.0))
    throw InvalidRateError("rapid plan gives nonpositive rate eta = " + fmt_g17(plan.eta));
  return plan;
}

RatePlan minimal_plan(const PhysParams& pp) {
  const double lam1 = eigenvalue(pp, 1);
  const int M = instability_level(pp);

  RatePlan plan;
  plan.mode = RateMode::minimal;
  plan.mu = pp.mu;
  plan.n_modes = M;
  plan.instability_level = M;
  plan.mu_lower = (M == 0) ? -std::numeric_limits<double>::infinity()
                           : 2.0 * (pp.gamma - pp.nu * lam1) / (1.0 - 1.0 / (2.0 * M + 1.0));
  plan.mu_upper = 2.0 * pp.nu * eigenvalue(pp, M + 1);
  if (!(pp.mu > plan.mu_lower && pp.mu < plan.mu_upper))
    throw InvalidRateError("mu = " + fmt_g17(pp.mu) + " outside the admissible interval (" +
                           fmt_g17(plan.mu_lower) + ", " + fmt_g17(plan.mu_upper) +
                           ") for instability level " + std::to_string(M));
  const double f = 2.0 * M + 1.0;
  plan.eta = pp.nu * lam1 - pp.gamma + 0.5 * pp.mu * (1.0 - 1.0 / (f * f));
  if (!(plan.eta > 0.0))
    throw InvalidRateError("minimal plan gives nonpositive rate eta = " + fmt_g17(plan.eta));
  return plan;
}

RatePlan make_rate_plan(const PhysParams& pp, RateMode mode) {
  return mode == RateMode::rapid ? rapid_plan(pp) : minimal_plan(pp);
}

double predicted_eta(const RatePlan& plan) { return plan.eta; }

std::string rate_mode_name(RateMode mode) {
  return mode == RateMode::rapid ? "rapid" : "minimal";
}

void rate_plan_report(std::ostream& os, const RatePlan& plan) {
  os << "mode: " << rate_mode_name(plan.mode) << '\n'
     << "instability_level: " << plan.instability_level << '\n'
     << "n_modes: " << plan.n_modes << '\n';
  if (plan.mode == RateMode::minimal)
    os << "mu_interval: (" << fmt_g17(plan.mu_lower) << ", " << fmt_g17(plan.mu_upper) << ")\n";
  os << "mu: " << fmt_g17(plan.mu) << '\n'
     << "predicted_eta: " << fmt_g17(plan.eta) << '\n';
}

} // namespace cglstab
