#include "cglstab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "cglstab/csvio.hpp"

namespace cglstab {

namespace {

// |u|^p elementwise via (|u|^2)^(p/2), with 0^p defined as 0.
double pow_abs(Complex u, double p) {
  const double a2 = std::norm(u);
  if (a2 == 0.0) return 0.0;
  if (p == 0.0) return 1.0;
  return std::pow(a2, 0.5 * p);
}

} // namespace

SystemMatrices build_system(const PhysParams& pp, const Grid& g, const TimeGrid& tg) {
  pp.validate();
  SystemMatrices sys;
  sys.grid = g;
  sys.tgrid = tg;
  sys.params = pp;

  const int n = g.n;
  const double dt = tg.dt;
  const Complex c = pp.diffusion() / (g.dx * g.dx);
  const Complex diag = 1.0 + 0.5 * dt * (2.0 * c - pp.gamma);
  const Complex off = -0.5 * dt * c;
  const Complex rdiag = 1.0 - 0.5 * dt * (2.0 * c - pp.gamma);
  const Complex roff = 0.5 * dt * c;

  sys.lhs = BandedMatrix(n, 2, 1);
  sys.rhs = BandedMatrix(n, 2, 1);
  sys.plain = BandedMatrix(n, 2, 1);
  for (int i = 1; i + 1 < n; ++i) {
    sys.lhs.at(i, i - 1) = off;
    sys.lhs.at(i, i) = diag;
    sys.lhs.at(i, i + 1) = off;
    sys.rhs.at(i, i - 1) = roff;
    sys.rhs.at(i, i) = rdiag;
    sys.rhs.at(i, i + 1) = roff;
    sys.plain.at(i, i - 1) = off;
    sys.plain.at(i, i) = diag;
    sys.plain.at(i, i + 1) = off;
  }
  sys.lhs.at(0, 0) = 1.0;
  const double h2 = 2.0 * g.dx;
  sys.lhs.at(n - 1, n - 3) = 1.0 / h2;
  sys.lhs.at(n - 1, n - 2) = -4.0 / h2;
  sys.lhs.at(n - 1, n - 1) = 3.0 / h2;
  sys.plain.at(0, 0) = 1.0;
  sys.plain.at(n - 1, n - 1) = 1.0;
  // rhs boundary rows stay zero; step data fills those slots
  return sys;
}

namespace {

ComplexField band_mul(const BandedMatrix& A, const ComplexField& v) {
  ComplexField out = ComplexField::Zero(A.n);
  for (int i = 0; i < A.n; ++i) {
    Complex s{0.0, 0.0};
    const int j0 = std::max(0, i - A.kl);
    const int j1 = std::min(A.n - 1, i + A.ku);
    for (int j = j0; j <= j1; ++j) s += A.a(A.ku + i - j, j) * v(j);
    out(i) = s;
  }
  return out;
}

} // namespace

ComplexField step_linear(const SystemMatrices& sys, const ComplexField& u, Complex neumann,
                         Complex dirichlet) {
  const int n = sys.grid.n;
  if (u.size() != n) throw DimensionError("step_linear: state length does not match grid");
  if (!sys.lu) sys.lu = std::make_shared<const BandedLU>(sys.lhs);
  ComplexField b = band_mul(sys.rhs, u);
  b(0) = dirichlet;
  b(n - 1) = neumann;
  ComplexField un = sys.lu->solve(b);
  un(0) = dirichlet; // the identity row holds it exactly, minus pivoting roundoff
  return un;
}

NonlinearStep step_nonlinear(const SystemMatrices& sys, const ComplexField& u,
                             const ControlLaw* law) {
  const PhysParams& pp = sys.params;
  if (!(pp.kappa > 0.0))
    throw DomainError("step_nonlinear requires kappa > 0; use step_linear instead");
  const int n = sys.grid.n;
  if (u.size() != n) throw DimensionError("step_nonlinear: state length does not match grid");

  const double dt = sys.tgrid.dt;
  const Complex kb = pp.nonlin();
  const double h2 = 2.0 * sys.grid.dx;

  // frozen old-level pieces of the Crank-Nicolson average
  ComplexField base = band_mul(sys.rhs, u);
  for (int i = 1; i + 1 < n; ++i) base(i) -= 0.5 * dt * kb * pow_abs(u(i), pp.p) * u(i);

  ComplexField us = u;
  NonlinearStep out;
  out.g = Complex{0.0, 0.0};
  double res = 0.0;
  for (int s = 0; s < kPicardCap; ++s) {
    const Complex g = law ? feedback(*law, sys.grid, us) : Complex{0.0, 0.0};

    BandedMatrix M = sys.lhs;
    ComplexField r(n);
    const ComplexField plain_us = band_mul(sys.plain, us);
    for (int i = 1; i + 1 < n; ++i) {
      const double a = pow_abs(us(i), pp.p);
      M.at(i, i) += 0.5 * dt * kb * a;
      r(i) = base(i) - plain_us(i) - 0.5 * dt * kb * a * us(i);
    }
    r(0) = -us(0); // drive the Dirichlet node to zero
    r(n - 1) = g - (us(n - 3) - 4.0 * us(n - 2) + 3.0 * us(n - 1)) / h2;

    const BandedLU lu(M);
    const ComplexField du = lu.solve(r);
    us += du;
    us(0) = Complex{0.0, 0.0};
    res = du.cwiseAbs().maxCoeff();
    out.g = g;
    if (res < kPicardTol) {
      out.u = std::move(us);
      out.iters = s + 1;
      out.residual = res;
      return out;
    }
  }
  throw NonConvergenceError(res, "Picard iteration exhausted " + std::to_string(kPicardCap) +
                                     " sweeps, last correction " + fmt_g17(res));
}

RunRecord run(const PhysParams& pp, const Grid& g, const TimeGrid& tg, const ComplexField& u0,
              const ControlLaw* law, Plant plant, const RunOptions& opts) {
  if (u0.size() != g.n) throw DimensionError("run: initial state length does not match grid");
  if (plant == Plant::nonlinear && !(pp.kappa > 0.0))
    throw ConfigError("nonlinear plant requested but kappa = 0");

  SystemMatrices sys = build_system(pp, g, tg);
  const int nt = tg.n;

  RunRecord rec;
  rec.t = tg.t;
  rec.l2.resize(nt);
  rec.h1.resize(nt);
  rec.g = ComplexField::Zero(nt);
  rec.picard.assign(nt, 0);

  ComplexField u = u0;
  rec.l2(0) = norm_l2(g, u);
  rec.h1(0) = norm_h1(g, u);

  auto want_snapshot = [&](int step) {
    return std::find(opts.snapshot_steps.begin(), opts.snapshot_steps.end(), step) !=
           opts.snapshot_steps.end();
  };
  rec.snapshots.resize(opts.snapshot_steps.size());
  auto store_snapshot = [&](int step, const ComplexField& state) {
    for (std::size_t k = 0; k < opts.snapshot_steps.size(); ++k)
      if (opts.snapshot_steps[k] == step) rec.snapshots[k] = state;
  };
  if (want_snapshot(0)) store_snapshot(0, u);

  for (int step = 0; step + 1 < nt; ++step) {
    try {
      if (plant == Plant::linear) {
        const Complex gval = law ? feedback(*law, g, u) : Complex{0.0, 0.0};
        u = step_linear(sys, u, gval);
        rec.g(step) = gval;
        rec.picard[step] = 0;
      } else {
        NonlinearStep ns = step_nonlinear(sys, u, law);
        u = std::move(ns.u);
        rec.g(step) = ns.g;
        rec.picard[step] = ns.iters;
      }
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError(e.residual(), "step " + std::to_string(step) + " (t = " +
                                                  fmt_g17(tg.t(step)) + "): " + e.what());
    } catch (const SolveError& e) {
      throw SolveError(e.pivot(), "step " + std::to_string(step) + " (t = " +
                                      fmt_g17(tg.t(step)) + "): " + e.what());
    }
    rec.l2(step + 1) = norm_l2(g, u);
    rec.h1(step + 1) = norm_h1(g, u);
    if (want_snapshot(step + 1)) store_snapshot(step + 1, u);
  }
  if (nt >= 2) {
    rec.g(nt - 1) = rec.g(nt - 2);
    rec.picard[nt - 1] = rec.picard[nt - 2];
  }
  rec.final_state = std::move(u);
  return rec;
}

DecayFit fit_decay_rate(const RealField& t, const RealField& norms, double t0, double t1) {
  if (t.size() != norms.size()) throw DimensionError("fit_decay_rate: length mismatch");
  if (!(t0 < t1)) throw WindowError("fit window needs t0 < t1");
  double st = 0, sy = 0, stt = 0, sty = 0;
  int m = 0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (t(i) < t0 || t(i) > t1) continue;
    if (!(norms(i) > 0.0))
      throw WindowError("nonpositive norm " + fmt_g17(norms(i)) + " at t = " + fmt_g17(t(i)) +
                        " inside the fit window");
    const double y = std::log(norms(i));
    st += t(i);
    sy += y;
    stt += t(i) * t(i);
    sty += t(i) * y;
    ++m;
  }
  if (m < 2) throw WindowError("fit window [" + fmt_g17(t0) + ", " + fmt_g17(t1) +
                               "] contains fewer than 2 samples");
  const double det = m * stt - st * st;
  if (det == 0.0) throw WindowError("degenerate fit window");
  DecayFit fit;
  const double slope = (m * sty - st * sy) / det;
  fit.rate = -slope;
  fit.intercept = (sy - slope * st) / m;
  return fit;
}

} // namespace cglstab
