#pragma once

#include <iosfwd>
#include <vector>

#include "cglstab/discretization.hpp"
#include "cglstab/kernel.hpp"

namespace cglstab {

// Eigenpairs of -d2/dx2 with Dirichlet left / Neumann right boundary:
//   e_j(x) = sqrt(2/L) sin((2j-1) pi x / (2L)),
//   lambda_j = ((2j-1) pi / (2L))^2,  j >= 1.
double eigenvalue(const PhysParams& pp, int j);
RealField eigenfunction(const Grid& g, int j);
RealMatrix eigenbasis(const Grid& g, int n_modes); // n x N, column j-1 is e_j

// The highest retained mode needs at least 8 grid points per wavelength:
// 2 (2N - 1) <= n - 1. Violations throw ResolutionError.
void check_mode_resolution(const Grid& g, int n_modes);

enum class OpKind { K, PN, Upsilon, Gamma, TN, TNinv };

// Dense n x n operator on grid fields, tagged by role.
struct OperatorMatrix {
  OpKind kind;
  ComplexMatrix m;
};

// Volterra quadrature operator: (K f)_i = trapezoid of k(x_i, y) f(y)
// over [0, x_i] on the grid prefix. Row 0 is zero.
ComplexMatrix build_kernel_operator(const Grid& g, const KernelTable& kt);

// Spectral projection onto the first n_modes eigenfunctions. With
// weighted = true modal coefficients are trapezoid inner products,
// P = E E^T diag(w); unweighted uses the plain transpose P = E E^T.
// Weighted is the variant that reproduces the published determinants
// and is the default everywhere.
OperatorMatrix build_projection(const Grid& g, int n_modes, bool weighted = true);

struct AdmissibilityRow {
  int j = 0;       // 1-based mode index
  Complex d;       // d_j = 1 + (C_j e_j, e_j)
  bool admissible = false;
};

struct UpsilonResult {
  OperatorMatrix upsilon;            // valid iff admissible
  std::vector<AdmissibilityRow> rows;
  bool admissible = false;
  int first_inadmissible = 0;        // 0 when admissible
};

inline constexpr double kAdmissibilityFloor = 1e-10;

// Mode-by-mode inverse construction:
//   C_j = (I - Upsilon_{j-1}) K,  a_j = C_j e_j,  d_j = 1 + trapz(a_j e_j),
//   Upsilon_j = C_j P_j - d_j^{-1} a_j <C_j P_j ., e_j>.
// The pairing is bilinear (no conjugation). Recursion stops at the first
// |d_j| below kAdmissibilityFloor; rows collected so far are returned
// either way so a report can always be produced.
UpsilonResult build_upsilon(const PhysParams& pp, const Grid& g, const ComplexMatrix& K,
                            bool weighted = true);

// Throws InadmissibleError (naming the mode) unless r.admissible.
void require_admissible(const UpsilonResult& r);

// CSV rows (j, re_d, im_d, abs_d, verdict).
void admissibility_report(std::ostream& os, const UpsilonResult& r);

// u = (I + K P_N) w and its inverse w = (I - Upsilon_N) u.
ComplexField forward_transform(const ComplexMatrix& K, const OperatorMatrix& PN,
                               const ComplexField& w);
ComplexField inverse_transform(const UpsilonResult& ups, const ComplexField& u);

OperatorMatrix make_tn(const ComplexMatrix& K, const OperatorMatrix& PN);
OperatorMatrix make_tn_inverse(const UpsilonResult& ups);
// Gamma_N = I - P_N Upsilon_N; satisfies P_N (I - Upsilon_N) = Gamma_N P_N.
OperatorMatrix make_gamma(const OperatorMatrix& PN, const UpsilonResult& ups);

} // namespace cglstab
