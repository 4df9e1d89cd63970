#include "cglstab/kernel.hpp"

#include <cmath>
#include <ostream>

#include "cglstab/csvio.hpp"

namespace cglstab {

namespace {
constexpr int kSeriesCap = 200;
constexpr double kSeriesTol = 1e-16;
} // namespace

Complex kernel_value(const PhysParams& pp, double x, double y) {
  if (!(0.0 <= y && y <= x && x <= pp.L))
    throw DomainError("kernel_value: (" + fmt_g17(x) + ", " + fmt_g17(y) +
                      ") outside the triangle 0 <= y <= x <= L");
  const Complex B = pp.diffusion();
  const Complex z = -pp.mu * (x * x - y * y) / (4.0 * B);
  Complex term{1.0, 0.0};
  Complex sum = term;
  for (int m = 0; m < kSeriesCap; ++m) {
    term *= z / static_cast<double>((m + 1) * (m + 2));
    sum += term;
    if (std::abs(term) <= kSeriesTol * (1.0 + std::abs(sum))) break;
  }
  return -pp.mu * y / (2.0 * B) * sum;
}

ComplexField deriv_trace(const PhysParams& pp, const Grid& g) {
  const Complex B = pp.diffusion();
  const Complex zc = -pp.mu / (4.0 * B);
  const double L = g.L;
  ComplexField out(g.n);
  for (int j = 0; j < g.n; ++j) {
    const double y = g.x(j);
    const double w = L * L - y * y;
    // term-differentiated series: d/dx (x^2-y^2)^m picks up 2 m x
    Complex u = zc / 2.0;
    Complex s = u;
    for (int m = 1; m < kSeriesCap; ++m) {
      u *= zc * w / static_cast<double>(m * (m + 2));
      s += u;
      if (std::abs(u) <= kSeriesTol * (1.0 + std::abs(s))) break;
    }
    out(j) = (-pp.mu * y / (2.0 * B)) * 2.0 * L * s;
  }
  return out;
}

int choose_truncation(const PhysParams& pp, const Grid& g) {
  // The series argument is largest at (x, y) = (L, 0); the term
  // magnitude there dominates the whole triangle, so the uniform
  // truncation index can be read off that corner alone.
  const Complex B = pp.diffusion();
  const Complex z = -pp.mu * g.L * g.L / (4.0 * B);
  Complex term{1.0, 0.0};
  Complex sum = term;
  for (int m = 0; m < kSeriesCap; ++m) {
    const Complex next = term * z / static_cast<double>((m + 1) * (m + 2));
    if (std::abs(next) <= kSeriesTol * (1.0 + std::abs(sum + next))) return m;
    term = next;
    sum += term;
  }
  throw NonConvergenceError(std::abs(term),
                            "kernel series not converged within " + std::to_string(kSeriesCap) +
                                " terms; |last term| = " + std::to_string(std::abs(term)));
}

KernelTable build_kernel_table(const PhysParams& pp, const Grid& g) {
  KernelTable kt;
  kt.n = g.n;
  kt.truncation = choose_truncation(pp, g);
  kt.k = ComplexMatrix::Zero(g.n, g.n);
  const Complex B = pp.diffusion();
  const Complex zfac = -pp.mu / (4.0 * B);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    for (int j = 0; j <= i; ++j) {
      const double y = g.x(j);
      const Complex z = zfac * (x * x - y * y);
      Complex term{1.0, 0.0};
      Complex sum = term;
      for (int m = 0; m < kt.truncation; ++m) {
        term *= z / static_cast<double>((m + 1) * (m + 2));
        sum += term;
      }
      kt.k(i, j) = -pp.mu * y / (2.0 * B) * sum;
    }
  }
  return kt;
}

double kernel_residual(const PhysParams& pp, const Grid& g) {
  if (g.n < 5)
    throw DomainError("kernel_residual needs at least 5 grid nodes, got " + std::to_string(g.n));
  const Complex B = pp.diffusion();
  const Complex rho = -pp.mu / B;
  const double h2 = g.dx * g.dx;
  // Stencil nodes stay two away from y = 0, y = x and x = L so every
  // neighbour lies strictly inside the triangle.
  double worst = 0.0;
  bool any = false;
  const auto k = [&](int i, int j) { return kernel_value(pp, g.x(i), g.x(j)); };
  for (int i = 2; i <= g.n - 3; ++i) {
    for (int j = 2; j <= i - 2; ++j) {
      const Complex kxx = (k(i + 1, j) - 2.0 * k(i, j) + k(i - 1, j)) / h2;
      const Complex kyy = (k(i, j + 1) - 2.0 * k(i, j) + k(i, j - 1)) / h2;
      const Complex r = kxx - kyy - rho * k(i, j);
      worst = std::max(worst, std::abs(r));
      any = true;
    }
  }
  if (!any)
    throw DomainError("kernel_residual: grid too coarse, no interior stencil nodes");
  return worst;
}

void dump_kernel_csv(std::ostream& os, const Grid& g, const KernelTable& kt) {
  os << "i,j,x,y,re_k,im_k\n";
  for (int i = 0; i < kt.n; ++i)
    for (int j = 0; j <= i; ++j)
      os << i << ',' << j << ',' << fmt_g17(g.x(i)) << ',' << fmt_g17(g.x(j)) << ','
         << fmt_g17(kt.k(i, j).real()) << ',' << fmt_g17(kt.k(i, j).imag()) << '\n';
}

} // namespace cglstab
