#pragma once

#include <cstdint>

#include "cglstab/errors.hpp"
#include "cglstab/types.hpp"

namespace cglstab {

// Physical parameters of
//   u_t - (nu + i alpha) u_xx - gamma u + (kappa + i beta) |u|^p u = 0
// on (0, L) with u(0,t) = 0 and u_x(L,t) controlled, plus the target
// damping mu and the number of controlled modes n_modes.
struct PhysParams {
  double nu = 1.0;
  double alpha = 0.0;
  double gamma = 0.0;
  double L = 1.0;
  double kappa = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double mu = 0.0;
  int n_modes = 1;

  Complex diffusion() const { return {nu, alpha}; } // nu + i alpha
  Complex nonlin() const { return {kappa, beta}; }  // kappa + i beta
  bool is_linear() const { return kappa == 0.0; }

  // Throws ConfigError unless: nu > 0, gamma >= 0, L > 0, kappa >= 0,
  // beta == 0 when kappa == 0, 0 < p < 4 when kappa > 0, mu >= 0,
  // n_modes >= 1.
  void validate() const;
};

// nu = 1, alpha = 3, gamma = 23, L = 1, linear, mu = 60, two modes.
PhysParams experiment1_params();
// nu = 1, alpha = 1, gamma = 10, L = 1, cubic term 1 + 4i (p = 2),
// mu = 12, one mode.
PhysParams experiment2_params();

// Uniform spatial grid on [0, L]. x(0) == 0 and x(n-1) == L exactly;
// w holds trapezoid quadrature weights (dx, halved at the endpoints).
struct Grid {
  int n = 0;
  double L = 0.0;
  double dx = 0.0;
  RealField x;
  RealField w;

  static Grid uniform(int n, double L); // n >= 3, L > 0
};

// Uniform time grid on [0, t_max], n >= 2 nodes, t(n-1) == t_max exactly.
struct TimeGrid {
  int n = 0;
  double t_max = 0.0;
  double dt = 0.0;
  RealField t;

  static TimeGrid uniform(int n, double t_max);
};

double trapz(const Grid& g, const RealField& f);
Complex trapz(const Grid& g, const ComplexField& f);

// Second-order first derivative: centered interiorly, one-sided
// three-point stencils at both endpoints.
ComplexField derivative(const Grid& g, const ComplexField& f);
RealField derivative(const Grid& g, const RealField& f);

double norm_l2(const Grid& g, const ComplexField& f);
// sqrt(norm_l2(f)^2 + norm_l2(Df)^2) with Df from derivative().
double norm_h1(const Grid& g, const ComplexField& f);

// Deterministic random smooth test fields: combinations of the first
// n_low eigenmodes with standard-normal complex coefficients.
ComplexField random_mode_field(const Grid& g, int n_low, std::uint64_t seed);

} // namespace cglstab
