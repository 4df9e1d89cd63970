#include "cglstab/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cglstab {

namespace {
constexpr double kSingularFloor = 1e-300;
}

BandedMatrix::BandedMatrix(int n_, int kl_, int ku_) : n(n_), kl(kl_), ku(ku_) {
  if (n < 1 || kl < 0 || ku < 0)
    throw DimensionError("banded matrix needs n >= 1 and nonnegative bandwidths");
  a = ComplexMatrix::Zero(kl + ku + 1, n);
}

Complex& BandedMatrix::at(int i, int j) {
  if (!in_band(i, j))
    throw DimensionError("banded entry (" + std::to_string(i) + "," + std::to_string(j) +
                         ") outside band kl=" + std::to_string(kl) + " ku=" + std::to_string(ku));
  return a(ku + i - j, j);
}

Complex BandedMatrix::at(int i, int j) const {
  if (i < 0 || j < 0 || i >= n || j >= n)
    throw DimensionError("banded index out of range");
  if (i - j > kl || j - i > ku) return {0.0, 0.0};
  return a(ku + i - j, j);
}

void BandedMatrix::zero_row(int i) {
  for (int j = std::max(0, i - kl); j <= std::min(n - 1, i + ku); ++j) a(ku + i - j, j) = 0.0;
}

ComplexMatrix BandedMatrix::dense() const {
  ComplexMatrix d = ComplexMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i) d(i, j) = a(ku + i - j, j);
  return d;
}

BandedLU::BandedLU(const BandedMatrix& A) : n_(A.n), kl_(A.kl), ku_(A.ku) {
  if (n_ < kDenseCutoff) {
    dense_ = true;
    dlu_.compute(A.dense());
    min_pivot_ = dlu_.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(min_pivot_ > kSingularFloor))
      throw SolveError(min_pivot_, "singular matrix in dense LU, pivot magnitude " +
                                       std::to_string(min_pivot_));
    return;
  }

  const int kl = kl_, ku = ku_;
  const int rows = 2 * kl + ku + 1;
  ab_ = ComplexMatrix::Zero(rows, n_);
  ab_.bottomRows(kl + ku + 1) = A.a; // rows [0, kl) hold pivoting fill-in
  piv_.assign(n_, 0);
  min_pivot_ = std::numeric_limits<double>::infinity();

  // Row index of A(i, j) inside ab_ is kl + ku + i - j.
  const auto idx = [kl, ku](int i, int j) { return kl + ku + i - j; };

  for (int k = 0; k < n_; ++k) {
    const int ilast = std::min(n_ - 1, k + kl);
    int p = k;
    double best = std::abs(ab_(idx(k, k), k));
    for (int i = k + 1; i <= ilast; ++i) {
      const double v = std::abs(ab_(idx(i, k), k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    piv_[k] = p;
    min_pivot_ = std::min(min_pivot_, best);
    if (!(best > kSingularFloor))
      throw SolveError(best, "singular matrix in banded LU at column " + std::to_string(k) +
                                 ", pivot magnitude " + std::to_string(best));

    const int jlast = std::min(n_ - 1, k + kl + ku);
    if (p != k)
      for (int j = k; j <= jlast; ++j) std::swap(ab_(idx(k, j), j), ab_(idx(p, j), j));

    const Complex pivot = ab_(idx(k, k), k);
    for (int i = k + 1; i <= ilast; ++i) {
      const Complex m = ab_(idx(i, k), k) / pivot;
      ab_(idx(i, k), k) = m; // multiplier stored in place
      for (int j = k + 1; j <= jlast; ++j) ab_(idx(i, j), j) -= m * ab_(idx(k, j), j);
    }
  }
}

ComplexField BandedLU::solve(const ComplexField& b) const {
  if (b.size() != n_)
    throw DimensionError("solve: rhs length " + std::to_string(b.size()) +
                         " does not match matrix size " + std::to_string(n_));
  if (dense_) return dlu_.solve(b);

  const int kl = kl_, ku = ku_;
  const auto idx = [kl, ku](int i, int j) { return kl + ku + i - j; };
  ComplexField x = b;
  for (int k = 0; k < n_; ++k) {
    if (piv_[k] != k) std::swap(x(k), x(piv_[k]));
    const int ilast = std::min(n_ - 1, k + kl);
    for (int i = k + 1; i <= ilast; ++i) x(i) -= ab_(idx(i, k), k) * x(k);
  }
  for (int k = n_ - 1; k >= 0; --k) {
    const int jlast = std::min(n_ - 1, k + kl + ku);
    Complex s = x(k);
    for (int j = k + 1; j <= jlast; ++j) s -= ab_(idx(k, j), j) * x(j);
    x(k) = s / ab_(idx(k, k), k);
  }
  return x;
}

} // namespace cglstab
