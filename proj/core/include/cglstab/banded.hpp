#pragma once

#include <vector>

#include "cglstab/errors.hpp"
#include "cglstab/types.hpp"

namespace cglstab {

// Complex band matrix, LAPACK-style storage: a(ku + i - j, j) = A(i, j)
// for max(0, j-ku) <= i <= min(n-1, j+kl). Entries outside the band are
// identically zero and cannot be assigned.
struct BandedMatrix {
  int n = 0;
  int kl = 0;
  int ku = 0;
  ComplexMatrix a; // (kl + ku + 1) x n

  BandedMatrix() = default;
  BandedMatrix(int n_, int kl_, int ku_);

  bool in_band(int i, int j) const {
    return i >= 0 && j >= 0 && i < n && j < n && i - j <= kl && j - i <= ku;
  }
  Complex& at(int i, int j);
  Complex at(int i, int j) const; // zero outside the band
  void zero_row(int i);
  ComplexMatrix dense() const;
};

// LU factorization with partial pivoting of a BandedMatrix. Fill-in from
// row swaps widens the upper band to kl + ku; storage follows the gbtrf
// layout with kl extra rows on top. Below kDenseCutoff unknowns the
// factorization falls back to dense Eigen LU (same interface, same
// pivot diagnostics).
class BandedLU {
public:
  static constexpr int kDenseCutoff = 64;

  // Throws SolveError (with the pivot magnitude) on a singular pivot.
  explicit BandedLU(const BandedMatrix& A);

  ComplexField solve(const ComplexField& b) const;
  double min_pivot() const { return min_pivot_; }
  bool dense_fallback() const { return dense_; }

private:
  int n_ = 0, kl_ = 0, ku_ = 0;
  bool dense_ = false;
  double min_pivot_ = 0.0;
  ComplexMatrix ab_;      // (2*kl + ku + 1) x n, banded path
  std::vector<int> piv_;  // row swapped with at elimination step k
  Eigen::PartialPivLU<ComplexMatrix> dlu_;
};

} // namespace cglstab
