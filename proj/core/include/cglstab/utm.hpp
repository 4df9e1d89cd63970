#pragma once

#include <iosfwd>
#include <vector>

#include "cglstab/discretization.hpp"

namespace cglstab {

// Contour-integral reference evaluator for the linear model
//   u_t - (nu + i alpha) u_xx - gamma u = f,  u(0,t) = a(t), u_x(L,t) = b(t).
// The damping is removed by the substitution u = e^{gamma t} w, so all
// spectral machinery runs on the pure dispersive part B = nu + i alpha.
//
// The representation integrates over the real line plus two ray pairs
// bounding the sectors where Re(B k^2) < 0; the rays are rotated into
// the decaying region by half the available angular margin. Paired rays
// share one radial quadrature grid so their slowly decaying tails
// cancel to rounding.

struct ContourSpec {
  double lambda_slope = -1.0; // ray slope; <= 0 derives (-alpha + hypot(alpha, nu)) / nu
  double r_max = -1.0;        // radial extent; <= 0 adapts until e^{-c r^2 t} < 1e-18
  int n_quad = -1;            // 16-point panels per ray; <= 0 scales with r_max
};

// Boundary samples on a uniform time grid; piecewise-linear in time.
// For a well-posed comparison a(0) should match u0 at x = 0.
struct BoundaryData {
  TimeGrid tgrid;
  ComplexField a;
  ComplexField b;
};

// int_0^L e^{i k (c - x)} f(x) dx with f piecewise linear on the grid;
// exact per interval, uniformly accurate in |k|. Throws RangeError when
// the exponential factor overflows.
Complex finite_fourier(const Grid& g, const ComplexField& f, Complex k, double c);

// int_0^t e^{omega s} f(s) ds with f piecewise linear on the time grid;
// t must lie in [0, t_max]. Exact per interval with a series branch for
// small |omega| dt. Throws RangeError when e^{omega t} overflows.
Complex temporal_transform(const TimeGrid& tg, const ComplexField& f, Complex omega, double t);

class UtmEvaluator {
public:
  UtmEvaluator(const PhysParams& pp, const Grid& g, ComplexField u0);

  void set_boundary(BoundaryData bd);
  // Forcing samples f[j] on the spatial grid at time node j.
  void set_forcing(TimeGrid tg, std::vector<ComplexField> f);

  // Throws DomainError for x outside (0, L) or t outside (0, data
  // horizon]; SingularityError if a quadrature node lands within 1e-14
  // of a denominator zero.
  Complex evaluate(double x, double t, const ContourSpec& spec = {}) const;

private:
  PhysParams pp_;
  Grid g_;
  ComplexField u0_;
  bool has_boundary_ = false;
  TimeGrid btg_;
  ComplexField ga_, hb_; // damping-shifted boundary samples
  bool has_forcing_ = false;
  TimeGrid ftg_;
  std::vector<ComplexField> f_; // damping-shifted forcing samples
};

struct CrosscheckRow {
  double x = 0.0;
  double t = 0.0;
  Complex fd;
  Complex utm;
  double rel_err = 0.0;
};

struct CrosscheckResult {
  std::vector<CrosscheckRow> rows;
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Marches the Crank-Nicolson scheme over tg (Dirichlet row takes the
// new-level a, Neumann row the old-level b, matching the feedback
// convention) and compares against the contour evaluator on the
// (xs x ts) lattice. Each row's error is normalized by the sup of the
// finite-difference snapshot at that time. Requires the linear model
// and, when boundary data is given, a(0) compatible with u0(0) and the
// data sampled on tg itself.
CrosscheckResult cross_validate(const PhysParams& pp, const Grid& g, const TimeGrid& tg,
                                const ComplexField& u0, const BoundaryData* bd,
                                const std::vector<double>& xs, const std::vector<double>& ts,
                                double tolerance, const ContourSpec& spec = {});

// CSV rows (x, t, re_fd, im_fd, re_utm, im_utm, rel_err).
void crosscheck_report(std::ostream& os, const CrosscheckResult& r);

} // namespace cglstab
