#include "cglstab/transform.hpp"

#include <cmath>
#include <ostream>

#include "cglstab/csvio.hpp"

namespace cglstab {

double eigenvalue(const PhysParams& pp, int j) {
  if (j < 1) throw DomainError("eigenvalue index must be >= 1");
  const double pi = std::acos(-1.0);
  const double k = (2.0 * j - 1.0) * pi / (2.0 * pp.L);
  return k * k;
}

RealField eigenfunction(const Grid& g, int j) {
  if (j < 1) throw DomainError("eigenfunction index must be >= 1");
  const double pi = std::acos(-1.0);
  const double k = (2.0 * j - 1.0) * pi / (2.0 * g.L);
  const double amp = std::sqrt(2.0 / g.L);
  RealField e(g.n);
  for (int i = 0; i < g.n; ++i) e(i) = amp * std::sin(k * g.x(i));
  return e;
}

RealMatrix eigenbasis(const Grid& g, int n_modes) {
  if (n_modes < 1) throw DomainError("eigenbasis needs n_modes >= 1");
  RealMatrix E(g.n, n_modes);
  for (int j = 1; j <= n_modes; ++j) E.col(j - 1) = eigenfunction(g, j);
  return E;
}

void check_mode_resolution(const Grid& g, int n_modes) {
  if (2 * (2 * n_modes - 1) > g.n - 1)
    throw ResolutionError("mode " + std::to_string(n_modes) + " needs at least " +
                          std::to_string(2 * (2 * n_modes - 1) + 1) + " grid nodes (8 per wavelength), got " +
                          std::to_string(g.n));
}

ComplexMatrix build_kernel_operator(const Grid& g, const KernelTable& kt) {
  if (kt.n != g.n) throw DimensionError("kernel table size does not match grid");
  ComplexMatrix K = ComplexMatrix::Zero(g.n, g.n);
  for (int i = 1; i < g.n; ++i) {
    // trapezoid over the prefix [0, x_i]; k(x_i, 0) = 0 so the halved
    // left endpoint weight is immaterial
    for (int j = 0; j <= i; ++j) {
      double wq = g.dx;
      if (j == 0 || j == i) wq *= 0.5;
      K(i, j) = wq * kt.k(i, j);
    }
  }
  return K;
}

OperatorMatrix build_projection(const Grid& g, int n_modes, bool weighted) {
  check_mode_resolution(g, n_modes);
  const RealMatrix E = eigenbasis(g, n_modes);
  RealMatrix P;
  if (weighted)
    P = E * (E.transpose() * g.w.asDiagonal());
  else
    P = E * E.transpose();
  return {OpKind::PN, P.cast<Complex>()};
}

UpsilonResult build_upsilon(const PhysParams& pp, const Grid& g, const ComplexMatrix& K,
                            bool weighted) {
  const int N = pp.n_modes;
  check_mode_resolution(g, N);
  if (K.rows() != g.n || K.cols() != g.n)
    throw DimensionError("kernel operator size does not match grid");

  const RealMatrix E = eigenbasis(g, N);
  UpsilonResult out;
  ComplexMatrix Ups = ComplexMatrix::Zero(g.n, g.n);

  for (int j = 1; j <= N; ++j) {
    const ComplexMatrix C = K - Ups * K; // (I - Upsilon_{j-1}) K
    const RealField ej = E.col(j - 1);
    const ComplexField aj = C * ej.cast<Complex>();
    const Complex dj =
        1.0 + (aj.array() * ej.array().cast<Complex>() * g.w.array().cast<Complex>()).sum();

    AdmissibilityRow row;
    row.j = j;
    row.d = dj;
    row.admissible = std::abs(dj) >= kAdmissibilityFloor;
    out.rows.push_back(row);
    if (!row.admissible) {
      out.admissible = false;
      out.first_inadmissible = j;
      out.upsilon = {OpKind::Upsilon, ComplexMatrix()};
      return out;
    }

    const RealMatrix Ej = E.leftCols(j);
    ComplexMatrix CPj;
    if (weighted)
      CPj = ((C * Ej.cast<Complex>()) * Ej.transpose().cast<Complex>()) *
            g.w.cast<Complex>().asDiagonal();
    else
      CPj = (C * Ej.cast<Complex>()) * Ej.transpose().cast<Complex>();
    // row functional phi -> <(C P_j phi), e_j> with trapezoid pairing
    const Eigen::RowVectorXcd m =
        (g.w.array() * ej.array()).matrix().transpose().cast<Complex>() * CPj;
    Ups = CPj - (aj * m) / dj;
  }

  out.admissible = true;
  out.first_inadmissible = 0;
  out.upsilon = {OpKind::Upsilon, std::move(Ups)};
  return out;
}

void require_admissible(const UpsilonResult& r) {
  if (r.admissible) return;
  const int j = r.first_inadmissible;
  double abs_d = 0.0;
  for (const auto& row : r.rows)
    if (row.j == j) abs_d = std::abs(row.d);
  throw InadmissibleError(j, abs_d,
                          "mode " + std::to_string(j) + " inadmissible: |d_" + std::to_string(j) +
                              "| = " + std::to_string(abs_d) + " below floor");
}

void admissibility_report(std::ostream& os, const UpsilonResult& r) {
  os << "j,re_d,im_d,abs_d,verdict\n";
  for (const auto& row : r.rows)
    os << row.j << ',' << fmt_g17(row.d.real()) << ',' << fmt_g17(row.d.imag()) << ','
       << fmt_g17(std::abs(row.d)) << ',' << (row.admissible ? "admissible" : "inadmissible")
       << '\n';
}

ComplexField forward_transform(const ComplexMatrix& K, const OperatorMatrix& PN,
                               const ComplexField& w) {
  if (PN.kind != OpKind::PN) throw DomainError("forward_transform expects a PN operator");
  return w + K * (PN.m * w);
}

ComplexField inverse_transform(const UpsilonResult& ups, const ComplexField& u) {
  require_admissible(ups);
  return u - ups.upsilon.m * u;
}

OperatorMatrix make_tn(const ComplexMatrix& K, const OperatorMatrix& PN) {
  if (PN.kind != OpKind::PN) throw DomainError("make_tn expects a PN operator");
  ComplexMatrix T = K * PN.m;
  T += ComplexMatrix::Identity(T.rows(), T.cols());
  return {OpKind::TN, std::move(T)};
}

OperatorMatrix make_tn_inverse(const UpsilonResult& ups) {
  require_admissible(ups);
  ComplexMatrix T = -ups.upsilon.m;
  T += ComplexMatrix::Identity(T.rows(), T.cols());
  return {OpKind::TNinv, std::move(T)};
}

OperatorMatrix make_gamma(const OperatorMatrix& PN, const UpsilonResult& ups) {
  if (PN.kind != OpKind::PN) throw DomainError("make_gamma expects a PN operator");
  require_admissible(ups);
  ComplexMatrix G = -(PN.m * ups.upsilon.m);
  G += ComplexMatrix::Identity(G.rows(), G.cols());
  return {OpKind::Gamma, std::move(G)};
}

} // namespace cglstab
