#pragma once

#include <iosfwd>
#include <string>

#include "cglstab/transform.hpp"

namespace cglstab {

// Neumann feedback
//   g(u) = trapz(k_x(L, .) v) + zeta v(L),  v = P_N (I - Upsilon_N) u,
// with zeta = k(L, L) = -mu L / (2 (nu + i alpha)). v depends on u only
// through P_N u.
struct ControlLaw {
  int n_modes = 0;
  Complex zeta;
  ComplexField deriv_trace;   // k_x(L, y) on the grid
  ComplexMatrix gamma_matrix; // P_N (I - Upsilon_N)
};

ControlLaw build_control_law(const PhysParams& pp, const Grid& g, const OperatorMatrix& PN,
                             const UpsilonResult& ups);

Complex feedback(const ControlLaw& law, const Grid& g, const ComplexField& u);

enum class RateMode { rapid, minimal };

// Decay-rate plan. rapid: mu is prescribed, the mode count N is the
// smallest integer with
//   N > mu / (4 nu lambda_1) - 1/2  and  N > mu / (2 (mu + nu lambda_1 - gamma)) - 1/2
// (at least 1), requiring mu > gamma - nu lambda_1; predicted rate
//   eta = nu lambda_1 - gamma + mu (1 - 1/(2N+1)).
// minimal: N equals the instability level M = #{ j : nu lambda_j < gamma },
// mu must lie in the open interval
//   ( 2 (gamma - nu lambda_1) / (1 - 1/(2M+1)),  2 nu lambda_{M+1} )
// (lower bound -inf when M = 0); predicted rate
//   eta = nu lambda_1 - gamma + (mu/2) (1 - 1/(2N+1)^2).
// A plan with eta <= 0 is invalid (InvalidRateError).
struct RatePlan {
  RateMode mode = RateMode::minimal;
  double mu = 0.0;
  int n_modes = 0;          // N
  int instability_level = 0; // M
  double eta = 0.0;
  double mu_lower = 0.0;    // minimal mode only; -inf when M = 0
  double mu_upper = 0.0;    // minimal mode only
};

int instability_level(const PhysParams& pp);

RatePlan rapid_plan(const PhysParams& pp);
RatePlan minimal_plan(const PhysParams& pp);
RatePlan make_rate_plan(const PhysParams& pp, RateMode mode);

double predicted_eta(const RatePlan& plan);

// Human-readable block: mode, M, N, admissible mu interval, chosen mu,
// predicted eta.
void rate_plan_report(std::ostream& os, const RatePlan& plan);

std::string rate_mode_name(RateMode mode);

} // namespace cglstab
