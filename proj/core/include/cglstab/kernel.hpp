#pragma once

#include <iosfwd>

#include "cglstab/discretization.hpp"

namespace cglstab {

// Gain kernel of the Volterra transform, defined on the triangle
// 0 <= y <= x <= L by the absolutely convergent series
//   k(x, y) = -mu y / (2 B) * sum_m (-mu/(4B))^m (x^2-y^2)^m / (m! (m+1)!),
// with B = nu + i alpha. Boundary traces: k(x, 0) = 0 and
// k(x, x) = -mu x / (2 B).
//
// For alpha = 0 the series sums to the classical closed form
// -mu y/(2 nu) * 2 J1(xi)/xi with xi = sqrt(mu (x^2-y^2) / nu).

// Series evaluation at one point of the triangle, converged to
// relative 1e-16. Points outside 0 <= y <= x <= L throw DomainError.
Complex kernel_value(const PhysParams& pp, double x, double y);

// x-derivative trace k_x(L, y), from the term-differentiated series.
ComplexField deriv_trace(const PhysParams& pp, const Grid& g);

// Highest series index needed so that the next term is below 1e-16 of
// the running sum uniformly over the grid triangle. Capped at 200;
// throws NonConvergenceError if the cap is hit.
int choose_truncation(const PhysParams& pp, const Grid& g);

// Tabulated kernel on the grid triangle, k(i, j) for j <= i; the strict
// upper triangle is zero by construction.
struct KernelTable {
  int n = 0;
  int truncation = 0; // highest retained series index
  ComplexMatrix k;    // n x n, lower triangle holds k(x_i, y_j)
};

KernelTable build_kernel_table(const PhysParams& pp, const Grid& g);

// Sup-norm residual of the kernel PDE  k_xx - k_yy = -(mu / B) k  over
// interior triangle nodes at least two nodes away from every edge, with
// centered second differences on converged series values. Second-order
// in dx; used for convergence-order checks. Requires n >= 5 and a grid
// with interior stencil room, else DomainError.
double kernel_residual(const PhysParams& pp, const Grid& g);

// Debug dump: CSV rows (i, j, x_i, y_j, re_k, im_k) over the triangle.
void dump_kernel_csv(std::ostream& os, const Grid& g, const KernelTable& kt);

} // namespace cglstab
