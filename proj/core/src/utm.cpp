#include "cglstab/utm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "cglstab/csvio.hpp"
#include "cglstab/solver.hpp"

namespace cglstab {

namespace {

// 16-point Gauss-Legendre rule on [-1, 1], positive half.
constexpr double kGlNode[8] = {
    0.09501250983763744, 0.28160355077925891, 0.45801677765722739, 0.61787624440264375,
    0.75540440835500303, 0.86563120238783174, 0.94457502307323258, 0.98940093499164993};
constexpr double kGlWeight[8] = {
    0.18945061045506850, 0.18260341504492359, 0.16915651939500254, 0.14959598881657673,
    0.12462897125553387, 0.09515851168249278, 0.06225352393864789, 0.02715245941175409};

struct Panels {
  std::vector<double> x, w;
};

Panels make_panels(double a, double b, int n_panels) {
  Panels p;
  p.x.reserve(16 * n_panels);
  p.w.reserve(16 * n_panels);
  const double step = (b - a) / n_panels;
  for (int i = 0; i < n_panels; ++i) {
    const double mid = a + (i + 0.5) * step;
    const double half = 0.5 * step;
    for (int q = 0; q < 8; ++q) {
      p.x.push_back(mid - half * kGlNode[q]);
      p.w.push_back(half * kGlWeight[q]);
      p.x.push_back(mid + half * kGlNode[q]);
      p.w.push_back(half * kGlWeight[q]);
    }
  }
  return p;
}

// a(q) = (1 - e^{-q})/q and b(q) = (1 - e^{-q}(1+q))/q^2, the moments of
// 1 and tau of e^{-q tau/h} on a unit interval. Series branch keeps the
// forms accurate through q -> 0.
void lin_ab(Complex q, Complex& a, Complex& b) {
  if (std::abs(q) < 1e-2) {
    a = 1.0 - q / 2.0 + q * q / 6.0 - q * q * q / 24.0 + q * q * q * q / 120.0;
    b = 0.5 - q / 3.0 + q * q / 8.0 - q * q * q / 30.0 + q * q * q * q / 144.0;
  } else {
    const Complex e = std::exp(-q);
    a = (1.0 - e) / q;
    b = (1.0 - e * (1.0 + q)) / (q * q);
  }
}

// int_0^t e^{-omega (t - s)} f(s) ds, f piecewise linear on tg, exact
// per interval. Only ever called with Re(omega (t - s)) >= 0 paths that
// cannot overflow when Re(omega) >= 0; raw transforms wrap it.
Complex decayed_transform(const TimeGrid& tg, const ComplexField& f, Complex om, double t) {
  Complex acc{0.0, 0.0};
  for (int i = 0; i + 1 < tg.n; ++i) {
    const double ta = tg.t(i);
    if (ta >= t - 1e-15) break;
    const double tb = tg.t(i + 1);
    Complex gb;
    double h, tb_eff;
    if (tb <= t + 1e-15) {
      gb = f(i + 1);
      h = tb - ta;
      tb_eff = tb;
    } else {
      const double fr = (t - ta) / (tb - ta);
      gb = f(i) + fr * (f(i + 1) - f(i));
      h = t - ta;
      tb_eff = t;
    }
    const Complex q = om * h;
    Complex a, b;
    lin_ab(q, a, b);
    const Complex A = h * a;
    const Complex B = h * h * b;
    const Complex slope = (gb - f(i)) / h;
    acc += std::exp(-om * (t - tb_eff)) * (gb * A - slope * B);
  }
  return acc;
}

} // namespace

Complex finite_fourier(const Grid& g, const ComplexField& f, Complex k, double c) {
  if (f.size() != g.n) throw DimensionError("finite_fourier: field length does not match grid");
  // exponent of e^{ik(c-x)} peaks at one of the interval ends
  const double e0 = k.imag() * (0.0 - c);
  const double e1 = k.imag() * (g.L - c);
  if (std::max(e0, e1) > 700.0)
    throw RangeError("finite_fourier overflow: exponent " + fmt_g17(std::max(e0, e1)));
  Complex acc{0.0, 0.0};
  const Complex ik = kImag * k;
  for (int i = 0; i + 1 < g.n; ++i) {
    const double h = g.x(i + 1) - g.x(i);
    const Complex q = ik * h;
    Complex a, b;
    lin_ab(q, a, b);
    const Complex slope = (f(i + 1) - f(i)) / h;
    acc += std::exp(ik * (c - g.x(i))) * (f(i) * (h * a) + slope * (h * h * b));
  }
  return acc;
}

Complex temporal_transform(const TimeGrid& tg, const ComplexField& f, Complex omega, double t) {
  if (f.size() != tg.n)
    throw DimensionError("temporal_transform: sample length does not match time grid");
  if (t < -1e-15 || t > tg.t_max + 1e-12 * (1.0 + tg.t_max))
    throw DomainError("temporal_transform: t = " + fmt_g17(t) + " outside [0, " +
                      fmt_g17(tg.t_max) + "]");
  if (t <= 0.0) return {0.0, 0.0};
  if (omega.real() * t > 700.0)
    throw RangeError("temporal_transform overflow: Re(omega) t = " + fmt_g17(omega.real() * t));
  return std::exp(omega * t) * decayed_transform(tg, f, omega, t);
}

UtmEvaluator::UtmEvaluator(const PhysParams& pp, const Grid& g, ComplexField u0)
    : pp_(pp), g_(g), u0_(std::move(u0)) {
  pp_.validate();
  if (!pp_.is_linear()) throw DomainError("contour evaluator handles the linear model only");
  if (u0_.size() != g_.n) throw DimensionError("initial state length does not match grid");
}

void UtmEvaluator::set_boundary(BoundaryData bd) {
  if (bd.a.size() != bd.tgrid.n || bd.b.size() != bd.tgrid.n)
    throw DimensionError("boundary sample length does not match its time grid");
  btg_ = bd.tgrid;
  ga_.resize(btg_.n);
  hb_.resize(btg_.n);
  for (int i = 0; i < btg_.n; ++i) {
    const double s = std::exp(-pp_.gamma * btg_.t(i)); // damping shift
    ga_(i) = bd.a(i) * s;
    hb_(i) = bd.b(i) * s;
  }
  has_boundary_ = true;
}

void UtmEvaluator::set_forcing(TimeGrid tg, std::vector<ComplexField> f) {
  if (static_cast<int>(f.size()) != tg.n)
    throw DimensionError("forcing needs one spatial sample per time node");
  for (const auto& fj : f)
    if (fj.size() != g_.n) throw DimensionError("forcing sample length does not match grid");
  ftg_ = tg;
  f_ = std::move(f);
  for (int j = 0; j < ftg_.n; ++j) f_[j] *= std::exp(-pp_.gamma * ftg_.t(j));
  has_forcing_ = true;
}

Complex UtmEvaluator::evaluate(double x, double t, const ContourSpec& spec) const {
  if (!(x > 0.0 && x < g_.L))
    throw DomainError("evaluation point x = " + fmt_g17(x) + " outside (0, " + fmt_g17(g_.L) + ")");
  if (!(t > 0.0)) throw DomainError("evaluation time must be positive");
  double horizon = std::numeric_limits<double>::infinity();
  if (has_boundary_) horizon = std::min(horizon, btg_.t_max);
  if (has_forcing_) horizon = std::min(horizon, ftg_.t_max);
  if (t > horizon + 1e-12 * (1.0 + horizon))
    throw DomainError("evaluation time " + fmt_g17(t) + " beyond sampled data horizon " +
                      fmt_g17(horizon));

  const Complex B = pp_.diffusion();
  const double L = g_.L;
  const double pi = std::acos(-1.0);

  const double lam = spec.lambda_slope > 0.0
                         ? spec.lambda_slope
                         : (-pp_.alpha + std::hypot(pp_.alpha, pp_.nu)) / pp_.nu;
  const double th1 = std::atan(lam);
  const double th2 = 0.5 * pi + th1;
  const double dth = 0.5 * std::min(th1, 0.5 * pi - th1);

  const Complex d1 = std::exp(kImag * (th1 - dth));
  const Complex d2 = std::exp(kImag * (th2 + dth));
  const double c1 = (B * d1 * d1).real();
  const double c2 = (B * d2 * d2).real();
  if (!(c1 > 0.0 && c2 > 0.0))
    throw DomainError("contour rays leave the decaying sector (slope " + fmt_g17(lam) + ")");
  const double c_min = std::min(c1, c2);

  const double r_max = spec.r_max > 0.0 ? spec.r_max : std::sqrt(41.45 / (c_min * t)) + 20.0;
  const int n_quad =
      spec.n_quad > 0 ? spec.n_quad : std::max(64, static_cast<int>(std::ceil(0.5 * r_max * L)));

  const auto ff = [&](Complex k, double c, const ComplexField& field) {
    return finite_fourier(g_, field, k, c);
  };

  Complex out{0.0, 0.0};

  // real-line term
  {
    const double K0 = std::sqrt(37.0 / (pp_.nu * t)) + 10.0;
    const int n0 = std::max(16, static_cast<int>(std::ceil(K0 * L / 3.0)));
    const Panels pan = make_panels(-K0, K0, n0);
    Complex acc{0.0, 0.0};
    ComplexField fk;
    if (has_forcing_) fk.resize(ftg_.n);
    for (std::size_t q = 0; q < pan.x.size(); ++q) {
      const Complex k{pan.x[q], 0.0};
      const Complex om = B * k * k;
      Complex integ = std::exp(kImag * k * x - om * t) * ff(k, 0.0, u0_);
      if (has_forcing_) {
        for (int j = 0; j < ftg_.n; ++j) fk(j) = ff(k, 0.0, f_[j]);
        integ += std::exp(kImag * k * x) * decayed_transform(ftg_, fk, om, t);
      }
      acc += pan.w[q] * integ;
    }
    out += acc / (2.0 * pi);
  }

  // two deformed ray pairs; shared radial grid so paired tails cancel
  struct Leg {
    Complex d;
    double sgn;
    bool pfam;
  };
  const Leg legs[4] = {{d1, +1.0, true}, {d2, -1.0, true}, {-d1, +1.0, false}, {-d2, -1.0, false}};
  const Panels pan = make_panels(0.0, r_max, n_quad);

  double min_den = std::numeric_limits<double>::infinity();
  ComplexField fk;
  if (has_forcing_) fk.resize(ftg_.n);

  for (const Leg& leg : legs) {
    Complex acc_init{0.0, 0.0}, acc_bnd{0.0, 0.0};
    for (std::size_t q = 0; q < pan.x.size(); ++q) {
      const Complex k = leg.d * pan.x[q];
      const Complex om = B * k * k;
      const double wq = pan.w[q];
      if (leg.pfam) {
        const Complex den = std::exp(2.0 * kImag * k * L) + 1.0;
        min_den = std::min(min_den, std::abs(den));
        const Complex pref = std::exp(kImag * k * x);
        Complex N = std::exp(-om * t) * (ff(k, 2.0 * L, u0_) + ff(-k, 0.0, u0_));
        if (has_forcing_) {
          for (int j = 0; j < ftg_.n; ++j) fk(j) = ff(k, 2.0 * L, f_[j]) + ff(-k, 0.0, f_[j]);
          N += decayed_transform(ftg_, fk, om, t);
        }
        acc_init += wq * pref * N / den;
        if (has_boundary_) {
          const Complex H = decayed_transform(btg_, hb_, om, t);
          const Complex G = decayed_transform(btg_, ga_, om, t);
          const Complex Nb = std::exp(kImag * k * L) * H + kImag * k * G;
          acc_bnd += wq * pref * Nb / den;
        }
      } else {
        const Complex den = 1.0 + std::exp(-2.0 * kImag * k * L);
        min_den = std::min(min_den, std::abs(den));
        const Complex pref = std::exp(kImag * k * (x - L));
        Complex N = std::exp(-om * t) * (ff(k, -L, u0_) - ff(-k, L, u0_));
        if (has_forcing_) {
          for (int j = 0; j < ftg_.n; ++j) fk(j) = ff(k, -L, f_[j]) - ff(-k, L, f_[j]);
          N += decayed_transform(ftg_, fk, om, t);
        }
        acc_init += wq * pref * N / den;
        if (has_boundary_) {
          const Complex H = decayed_transform(btg_, hb_, om, t);
          const Complex G = decayed_transform(btg_, ga_, om, t);
          const Complex Nb = H + kImag * k * std::exp(-kImag * k * L) * G;
          acc_bnd += wq * pref * Nb / den;
        }
      }
    }
    const double init_sign = leg.pfam ? -1.0 : +1.0;
    out += init_sign / (2.0 * pi) * leg.sgn * acc_init * leg.d;
    out += (-B / pi) * leg.sgn * acc_bnd * leg.d;
  }

  if (min_den < 1e-14)
    throw SingularityError("contour denominator magnitude " + fmt_g17(min_den) +
                           " below safety floor");

  return std::exp(pp_.gamma * t) * out; // undo the damping shift
}

CrosscheckResult cross_validate(const PhysParams& pp, const Grid& g, const TimeGrid& tg,
                                const ComplexField& u0, const BoundaryData* bd,
                                const std::vector<double>& xs, const std::vector<double>& ts,
                                double tolerance, const ContourSpec& spec) {
  if (!pp.is_linear()) throw DomainError("cross_validate requires the linear model");
  if (u0.size() != g.n) throw DimensionError("cross_validate: initial state length mismatch");
  if (bd) {
    if (bd->tgrid.n != tg.n || std::abs(bd->tgrid.t_max - tg.t_max) > 1e-12 * (1.0 + tg.t_max))
      throw DimensionError("boundary data must be sampled on the marching time grid");
    if (std::abs(bd->a(0) - u0(0)) > 1e-10 * (1.0 + u0.cwiseAbs().maxCoeff()))
      throw DomainError("incompatible data: a(0) != u0(0)");
  }
  if (!(tolerance > 0.0)) throw ConfigError("crosscheck tolerance must be positive");

  UtmEvaluator eval(pp, g, u0);
  if (bd) eval.set_boundary(*bd);

  // locate requested times on the marching grid
  std::vector<int> t_idx;
  for (double t : ts) {
    const double pos = t / tg.dt;
    const int i = static_cast<int>(std::lround(pos));
    if (i < 1 || i >= tg.n || std::abs(pos - i) > 1e-6)
      throw DomainError("crosscheck time " + fmt_g17(t) + " not a positive node of the time grid");
    t_idx.push_back(i);
  }
  for (double x : xs)
    if (!(x > 0.0 && x < g.L))
      throw DomainError("crosscheck point x = " + fmt_g17(x) + " outside (0, L)");

  SystemMatrices sys = build_system(pp, g, tg);
  ComplexField u = u0;
  std::vector<ComplexField> snaps(t_idx.size());
  for (int step = 0; step + 1 < tg.n; ++step) {
    const Complex neu = bd ? bd->b(step) : Complex{0.0, 0.0};
    const Complex dir = bd ? bd->a(step + 1) : Complex{0.0, 0.0};
    u = step_linear(sys, u, neu, dir);
    for (std::size_t m = 0; m < t_idx.size(); ++m)
      if (t_idx[m] == step + 1) snaps[m] = u;
  }

  CrosscheckResult res;
  res.tolerance = tolerance;
  for (std::size_t m = 0; m < t_idx.size(); ++m) {
    const double t = tg.t(t_idx[m]);
    const double scale = snaps[m].cwiseAbs().maxCoeff();
    for (double x : xs) {
      // linear interpolation of the finite-difference snapshot
      const double pos = x / g.dx;
      const int i0 = std::min(static_cast<int>(pos), g.n - 2);
      const double fr = pos - i0;
      const Complex fd = (1.0 - fr) * snaps[m](i0) + fr * snaps[m](i0 + 1);
      const Complex ut = eval.evaluate(x, t, spec);
      CrosscheckRow row;
      row.x = x;
      row.t = t;
      row.fd = fd;
      row.utm = ut;
      row.rel_err = std::abs(ut - fd) / (scale > 0.0 ? scale : 1.0);
      res.max_rel_err = std::max(res.max_rel_err, row.rel_err);
      res.rows.push_back(row);
    }
  }
  res.pass = res.max_rel_err <= tolerance;
  return res;
}

void crosscheck_report(std::ostream& os, const CrosscheckResult& r) {
  os << "x,t,re_fd,im_fd,re_utm,im_utm,rel_err\n";
  for (const auto& row : r.rows)
    os << fmt_g17(row.x) << ',' << fmt_g17(row.t) << ',' << fmt_g17(row.fd.real()) << ','
       << fmt_g17(row.fd.imag()) << ',' << fmt_g17(row.utm.real()) << ','
       << fmt_g17(row.utm.imag()) << ',' << fmt_g17(row.rel_err) << '\n';
}

} // namespace cglstab
