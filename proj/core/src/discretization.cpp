#include "cglstab/discretization.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace cglstab {

void PhysParams::validate() const {
  std::ostringstream bad;
  if (!(nu > 0.0)) bad << "nu must be positive (got " << nu << "); ";
  if (!(gamma >= 0.0)) bad << "gamma must be nonnegative (got " << gamma << "); ";
  if (!(L > 0.0)) bad << "L must be positive (got " << L << "); ";
  if (!(kappa >= 0.0)) bad << "kappa must be nonnegative (got " << kappa << "); ";
  if (kappa == 0.0 && beta != 0.0)
    bad << "beta must vanish when kappa is zero (got beta=" << beta << "); ";
  if (kappa > 0.0 && !(p > 0.0 && p < 4.0))
    bad << "p must lie in (0,4) when kappa > 0 (got " << p << "); ";
  if (!(mu >= 0.0)) bad << "mu must be nonnegative (got " << mu << "); ";
  if (n_modes < 1) bad << "n_modes must be at least 1 (got " << n_modes << "); ";
  const std::string s = bad.str();
  if (!s.empty()) throw ConfigError("invalid parameters: " + s.substr(0, s.size() - 2));
}

PhysParams experiment1_params() {
  PhysParams p;
  p.nu = 1.0;
  p.alpha = 3.0;
  p.gamma = 23.0;
  p.L = 1.0;
  p.mu = 60.0;
  p.n_modes = 2;
  return p;
}

PhysParams experiment2_params() {
  PhysParams p;
  p.nu = 1.0;
  p.alpha = 1.0;
  p.gamma = 10.0;
  p.L = 1.0;
  p.kappa = 1.0;
  p.beta = 4.0;
  p.p = 2.0;
  p.mu = 12.0;
  p.n_modes = 1;
  return p;
}

Grid Grid::uniform(int n, double L) {
  if (n < 3) throw ConfigError("grid needs at least 3 nodes, got " + std::to_string(n));
  if (!(L > 0.0)) throw ConfigError("grid length must be positive");
  Grid g;
  g.n = n;
  g.L = L;
  g.dx = L / (n - 1);
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // i/(n-1) evaluates to exactly 1.0 at the last node, so x(n-1) == L.
    g.x(i) = L * (static_cast<double>(i) / (n - 1));
    g.w(i) = g.dx;
  }
  g.w(0) = g.dx / 2;
  g.w(n - 1) = g.dx / 2;
  return g;
}

TimeGrid TimeGrid::uniform(int n, double t_max) {
  if (n < 2) throw ConfigError("time grid needs at least 2 nodes, got " + std::to_string(n));
  if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
  TimeGrid g;
  g.n = n;
  g.t_max = t_max;
  g.dt = t_max / (n - 1);
  g.t.resize(n);
  for (int i = 0; i < n; ++i) g.t(i) = t_max * (static_cast<double>(i) / (n - 1));
  return g;
}

namespace {
void check_len(const Grid& g, Eigen::Index len, const char* what) {
  if (len != g.n)
    throw DimensionError(std::string(what) + ": field length " + std::to_string(len) +
                         " does not match grid size " + std::to_string(g.n));
}
} // namespace

double trapz(const Grid& g, const RealField& f) {
  check_len(g, f.size(), "trapz");
  return g.w.dot(f);
}

Complex trapz(const Grid& g, const ComplexField& f) {
  check_len(g, f.size(), "trapz");
  return (g.w.cast<Complex>().array() * f.array()).sum();
}

template <typename Vec>
static Vec derivative_impl(const Grid& g, const Vec& f) {
  check_len(g, f.size(), "derivative");
  const int n = g.n;
  const double h2 = 2.0 * g.dx;
  Vec d(n);
  d(0) = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / h2;
  for (int i = 1; i + 1 < n; ++i) d(i) = (f(i + 1) - f(i - 1)) / h2;
  d(n - 1) = (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / h2;
  return d;
}

ComplexField derivative(const Grid& g, const ComplexField& f) { return derivative_impl(g, f); }
RealField derivative(const Grid& g, const RealField& f) { return derivative_impl(g, f); }

double norm_l2(const Grid& g, const ComplexField& f) {
  check_len(g, f.size(), "norm_l2");
  return std::sqrt((g.w.array() * f.array().abs2()).sum());
}

double norm_h1(const Grid& g, const ComplexField& f) {
  const ComplexField d = derivative(g, f);
  const double a = norm_l2(g, f);
  const double b = norm_l2(g, d);
  return std::sqrt(a * a + b * b);
}

ComplexField random_mode_field(const Grid& g, int n_low, std::uint64_t seed) {
  if (n_low < 1) throw DomainError("random_mode_field needs n_low >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  ComplexField f = ComplexField::Zero(g.n);
  const double pi = std::acos(-1.0);
  for (int j = 1; j <= n_low; ++j) {
    const Complex c{nd(rng), nd(rng)};
    const double kj = (2.0 * j - 1.0) * pi / (2.0 * g.L);
    const double amp = std::sqrt(2.0 / g.L);
    for (int i = 0; i < g.n; ++i) f(i) += c * (amp * std::sin(kj * g.x(i)));
  }
  return f;
}

} // namespace cglstab
