#include "cglstab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>

#include "cglstab/csvio.hpp"
#include "cglstab/utm.hpp"

namespace cglstab {

namespace {

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  std::ofstream os(std::filesystem::path(dir) / name, std::ios::binary);
  if (!os) throw ConfigError("cannot open output file " + name + " under " + dir);
  os << content;
}

std::string config_header(const ExperimentConfig& cfg) {
  return "# config_hash = " + hex64(config_hash(cfg)) + "\n";
}

struct ControlBundle {
  OperatorMatrix PN;
  UpsilonResult ups;
  ControlLaw law;
};

// Builds the gain machinery and always leaves an admissibility report
// behind, inadmissible or not.
ControlBundle build_control(const ExperimentConfig& cfg, const Grid& g) {
  const KernelTable kt = build_kernel_table(cfg.params, g);
  const ComplexMatrix K = build_kernel_operator(g, kt);
  ControlBundle cb;
  cb.ups = build_upsilon(cfg.params, g, K, cfg.weighted_projection);
  std::ostringstream adm;
  adm << config_header(cfg);
  admissibility_report(adm, cb.ups);
  write_file(cfg.out_dir, "admissibility.csv", adm.str());
  require_admissible(cb.ups);
  cb.PN = build_projection(g, cfg.params.n_modes, cfg.weighted_projection);
  cb.law = build_control_law(cfg.params, g, cb.PN, cb.ups);
  return cb;
}

} // namespace

int cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  const Grid g = Grid::uniform(cfg.n_x, cfg.params.L);
  const TimeGrid tg = TimeGrid::uniform(cfg.n_t, cfg.t_max);
  const ComplexField u0 = build_initial_state(cfg, g);
  const bool controlled = cfg.control_enabled();

  // rate plan is informational for uncontrolled runs, binding otherwise
  std::ostringstream plan_txt;
  plan_txt << config_header(cfg);
  bool have_plan = false;
  RatePlan plan;
  try {
    plan = make_rate_plan(cfg.params,
                          cfg.rate_mode == "rapid" ? RateMode::rapid : RateMode::minimal);
    rate_plan_report(plan_txt, plan);
    have_plan = true;
  } catch (const InvalidRateError& e) {
    if (controlled) throw;
    plan_txt << "rate plan unavailable: " << e.what() << "\n";
  }
  write_file(cfg.out_dir, "rateplan.txt", plan_txt.str());

  ControlLaw law;
  if (controlled) {
    ControlBundle cb = build_control(cfg, g);
    law = std::move(cb.law);
  }

  const RunRecord rec =
      run(cfg.params, g, tg, u0, controlled ? &law : nullptr, cfg.effective_plant());

  std::ostringstream norms;
  norms << config_header(cfg) << "t,l2,h1,re_g,im_g,picard_iters\n";
  for (int i = 0; i < tg.n; ++i)
    norms << fmt_g17(rec.t(i)) << ',' << fmt_g17(rec.l2(i)) << ',' << fmt_g17(rec.h1(i)) << ','
          << fmt_g17(rec.g(i).real()) << ',' << fmt_g17(rec.g(i).imag()) << ',' << rec.picard[i]
          << '\n';
  write_file(cfg.out_dir, "norms.csv", norms.str());

  std::ostringstream fin;
  fin << config_header(cfg) << "x,re_u,im_u,abs_u\n";
  for (int i = 0; i < g.n; ++i)
    fin << fmt_g17(g.x(i)) << ',' << fmt_g17(rec.final_state(i).real()) << ','
        << fmt_g17(rec.final_state(i).imag()) << ',' << fmt_g17(std::abs(rec.final_state(i)))
        << '\n';
  write_file(cfg.out_dir, "final_state.csv", fin.str());

  const DecayFit fit_h1 = fit_decay_rate(rec.t, rec.h1, cfg.resolved_fit_t0(), cfg.resolved_fit_t1());
  const DecayFit fit_l2 = fit_decay_rate(rec.t, rec.l2, cfg.resolved_fit_t0(), cfg.resolved_fit_t1());

  std::ostringstream sum;
  sum << config_header(cfg);
  sum << "preset: " << cfg.preset << "\n"
      << "plant: " << cfg.plant << "\n"
      << "control: " << (controlled ? "on" : "off") << "\n"
      << "n_x: " << cfg.n_x << "\n"
      << "n_t: " << cfg.n_t << "\n"
      << "t_max: " << fmt_g17(cfg.t_max) << "\n";
  if (have_plan) {
    sum << "rate_mode: " << rate_mode_name(plan.mode) << "\n"
        << "instability_level: " << plan.instability_level << "\n"
        << "planned_modes: " << plan.n_modes << "\n";
    if (plan.mode == RateMode::minimal)
      sum << "mu_interval: (" << fmt_g17(plan.mu_lower) << ", " << fmt_g17(plan.mu_upper)
          << ")\n";
  }
  if (controlled) sum << "verdict: admissible\n";
  sum << "h1_initial: " << fmt_g17(rec.h1(0)) << "\n"
      << "h1_final: " << fmt_g17(rec.h1(tg.n - 1)) << "\n"
      << "h1_ratio: " << fmt_g17(rec.h1(tg.n - 1) / rec.h1(0)) << "\n"
      << "fit_window: [" << fmt_g17(cfg.resolved_fit_t0()) << ", " << fmt_g17(cfg.resolved_fit_t1())
      << "]\n"
      << "fitted_rate_h1: " << fmt_g17(fit_h1.rate) << "\n"
      << "fitted_rate_l2: " << fmt_g17(fit_l2.rate) << "\n";
  if (have_plan)
    sum << "predicted_eta: " << fmt_g17(plan.eta) << "\n"
        << "rate_ratio: " << fmt_g17(fit_h1.rate / plan.eta) << "\n";
  else
    sum << "predicted_eta: unavailable\n";
  int max_picard = 0;
  for (int it : rec.picard) max_picard = std::max(max_picard, it);
  sum << "max_picard_iters: " << max_picard << "\n";
  write_file(cfg.out_dir, "summary.txt", sum.str());

  log << "run: wrote " << cfg.out_dir << "/{norms.csv, final_state.csv, rateplan.txt, summary.txt}"
      << (controlled ? " and admissibility.csv" : "") << "\n";
  log << "run: h1 " << fmt_g17(rec.h1(0)) << " -> " << fmt_g17(rec.h1(tg.n - 1))
      << ", fitted rate " << fmt_g17(fit_h1.rate);
  if (have_plan) log << " (predicted " << fmt_g17(plan.eta) << ")";
  log << "\n";
  return 0;
}

int cmd_admissibility(const ExperimentConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  const Grid g = Grid::uniform(cfg.n_x, cfg.params.L);

  std::vector<double> mus = cfg.admissibility.mu_values;
  if (mus.empty()) mus.push_back(cfg.params.mu);
  std::vector<int> ns;
  for (double v : cfg.admissibility.n_values) ns.push_back(static_cast<int>(std::lround(v)));
  if (ns.empty()) ns.push_back(cfg.params.n_modes);

  bool base_bad = false;
  std::ostringstream os;
  os << config_header(cfg) << "mu,n_modes,j,re_d,im_d,abs_d,verdict\n";
  for (double mu : mus) {
    PhysParams pp = cfg.params;
    pp.mu = mu;
    const KernelTable kt = build_kernel_table(pp, g);
    const ComplexMatrix K = build_kernel_operator(g, kt);
    for (int N : ns) {
      if (N < 1) throw ConfigError("admissibility sweep needs n_modes >= 1");
      PhysParams pn = pp;
      pn.n_modes = N;
      const UpsilonResult r = build_upsilon(pn, g, K, cfg.weighted_projection);
      for (const auto& row : r.rows)
        os << fmt_g17(mu) << ',' << N << ',' << row.j << ',' << fmt_g17(row.d.real()) << ','
           << fmt_g17(row.d.imag()) << ',' << fmt_g17(std::abs(row.d)) << ','
           << (row.admissible ? "admissible" : "inadmissible") << '\n';
      if (!r.admissible && mu == cfg.params.mu && N == cfg.params.n_modes) base_bad = true;
    }
  }
  write_file(cfg.out_dir, "admissibility.csv", os.str());
  log << "admissibility: wrote " << cfg.out_dir << "/admissibility.csv (" << mus.size() << " x "
      << ns.size() << " cases)\n";
  if (base_bad) {
    log << "admissibility: configured case inadmissible\n";
    return 3;
  }
  return 0;
}

int cmd_rateplan(const ExperimentConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  const RatePlan plan = make_rate_plan(
      cfg.params, cfg.rate_mode == "rapid" ? RateMode::rapid : RateMode::minimal);
  std::ostringstream os;
  os << config_header(cfg);
  rate_plan_report(os, plan);
  write_file(cfg.out_dir, "rateplan.txt", os.str());
  rate_plan_report(log, plan);
  return 0;
}

int cmd_crosscheck(const ExperimentConfig& cfg, std::ostream& log) {
  validate_config(cfg);
  if (cfg.crosscheck.xs.empty() || cfg.crosscheck.ts.empty())
    throw ConfigError("crosscheck needs nonempty xs and ts lattices");
  if (!cfg.params.is_linear())
    throw ConfigError("crosscheck compares the linear model; set kappa = 0");
  const Grid g = Grid::uniform(cfg.n_x, cfg.params.L);
  const TimeGrid tg = TimeGrid::uniform(cfg.n_t, cfg.t_max);
  const ComplexField u0 = build_initial_state(cfg, g);

  ContourSpec spec;
  spec.r_max = cfg.crosscheck.r_max;
  spec.n_quad = cfg.crosscheck.n_quad;
  const CrosscheckResult res = cross_validate(cfg.params, g, tg, u0, nullptr, cfg.crosscheck.xs,
                                              cfg.crosscheck.ts, cfg.crosscheck.tolerance, spec);

  std::ostringstream os;
  os << config_header(cfg);
  crosscheck_report(os, res);
  write_file(cfg.out_dir, "crosscheck.csv", os.str());

  log << "crosscheck: max_rel_err = " << fmt_g17(res.max_rel_err) << " tolerance = "
      << fmt_g17(res.tolerance) << " -> " << (res.pass ? "PASS" : "FAIL") << "\n";
  return res.pass ? 0 : 5;
}

namespace {
void expect(bool ok, const char* what) {
  if (!ok) throw DomainError(std::string("selftest failed: ") + what);
}
} // namespace

int cmd_selftest(std::ostream& log) {
  // quadrature
  {
    const Grid g = Grid::uniform(101, 1.0);
    RealField one = RealField::Ones(g.n);
    expect(std::abs(trapz(g, one) - 1.0) < 1e-15, "trapz of 1");
    expect(std::abs(trapz(g, RealField(g.x)) - 0.5) < 1e-15, "trapz of x");
    log << "ok quadrature\n";
  }
  // kernel boundary traces
  {
    const PhysParams pp = experiment1_params();
    const Grid g = Grid::uniform(51, pp.L);
    const KernelTable kt = build_kernel_table(pp, g);
    for (int i = 0; i < g.n; ++i) {
      expect(std::abs(kt.k(i, 0)) < 1e-14, "kernel zero trace");
      const Complex diag = -pp.mu * g.x(i) / (2.0 * pp.diffusion());
      expect(std::abs(kt.k(i, i) - diag) < 1e-12 * (1.0 + std::abs(diag)), "kernel diagonal");
    }
    log << "ok kernel traces\n";
  }
  // transform round trip
  {
    const PhysParams pp = experiment1_params();
    const Grid g = Grid::uniform(101, pp.L);
    const KernelTable kt = build_kernel_table(pp, g);
    const ComplexMatrix K = build_kernel_operator(g, kt);
    const UpsilonResult ups = build_upsilon(pp, g, K, true);
    expect(ups.admissible, "admissibility");
    const OperatorMatrix PN = build_projection(g, pp.n_modes, true);
    const ComplexField w = random_mode_field(g, 6, 7);
    const ComplexField u = forward_transform(K, PN, w);
    const ComplexField back = inverse_transform(ups, u);
    expect((back - w).cwiseAbs().maxCoeff() < 1e-8 * w.cwiseAbs().maxCoeff(), "round trip");
    log << "ok transform round trip\n";
  }
  // one linear step keeps the boundary rows exact
  {
    const PhysParams pp = experiment1_params();
    const Grid g = Grid::uniform(64, pp.L);
    const TimeGrid tg = TimeGrid::uniform(11, 0.01);
    SystemMatrices sys = build_system(pp, g, tg);
    ComplexField u(g.n);
    for (int i = 0; i < g.n; ++i) u(i) = std::sin(3.0 * g.x(i));
    const Complex gval{0.25, -0.125};
    const ComplexField un = step_linear(sys, u, gval);
    expect(std::abs(un(0)) == 0.0, "dirichlet row");
    const Complex neu =
        (3.0 * un(g.n - 1) - 4.0 * un(g.n - 2) + un(g.n - 3)) / (2.0 * g.dx);
    expect(std::abs(neu - gval) < 1e-10, "neumann row");
    log << "ok linear step\n";
  }
  // decay fit on an exact exponential
  {
    const TimeGrid tg = TimeGrid::uniform(101, 1.0);
    RealField n(tg.n);
    for (int i = 0; i < tg.n; ++i) n(i) = 2.0 * std::exp(-3.0 * tg.t(i));
    const DecayFit f = fit_decay_rate(tg.t, n, 0.1, 0.9);
    expect(std::abs(f.rate - 3.0) < 1e-10, "decay fit");
    log << "ok decay fit\n";
  }
  // banded solve against dense
  {
    BandedMatrix A(200, 2, 1);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int i = 0; i < A.n; ++i)
      for (int j = std::max(0, i - A.kl); j <= std::min(A.n - 1, i + A.ku); ++j)
        A.at(i, j) = Complex{ud(rng), ud(rng)} + (i == j ? Complex{3.0, 0.0} : Complex{0.0, 0.0});
    ComplexField b(A.n);
    for (int i = 0; i < A.n; ++i) b(i) = Complex{ud(rng), ud(rng)};
    const BandedLU lu(A);
    const ComplexField x = lu.solve(b);
    const ComplexField r = A.dense() * x - b;
    expect(r.cwiseAbs().maxCoeff() < 1e-10, "banded solve");
    log << "ok banded solve\n";
  }
  log << "selftest passed\n";
  return 0;
}

} // namespace cglstab
