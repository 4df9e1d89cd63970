// Command-line front end. Thin argument layer over the pipeline
// subcommands; all real work and all output formats live in the core
// library so tests can drive the same code paths in-process.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cglstab/pipeline.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::int64_t seed = -1;
  int nx = 0;
  int nt = 0;
  double tmax = 0.0;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path, "config file (TOML subset)");
  sub->add_option("--preset", o.preset, "baseline when no config file is given: exp1, exp2, custom");
  sub->add_option("--out", o.out_dir, "output directory override");
  sub->add_option("--seed", o.seed, "random seed override")->check(CLI::NonNegativeNumber);
  sub->add_option("--nx", o.nx, "spatial node count override")->check(CLI::PositiveNumber);
  sub->add_option("--nt", o.nt, "time node count override")->check(CLI::PositiveNumber);
  sub->add_option("--tmax", o.tmax, "time horizon override")->check(CLI::PositiveNumber);
}

cglstab::ExperimentConfig resolve(const CommonOpts& o) {
  cglstab::ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream is(o.config_path, std::ios::binary);
    if (!is) throw cglstab::ConfigError("cannot open config file " + o.config_path);
    std::ostringstream ss;
    ss << is.rdbuf();
    cfg = cglstab::parse_config(ss.str());
    if (!o.preset.empty())
      throw cglstab::ConfigError("--preset and --config are mutually exclusive");
  } else {
    cfg = cglstab::default_config(o.preset.empty() ? "custom" : o.preset);
  }
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  if (o.nx > 0) cfg.n_x = o.nx;
  if (o.nt > 0) cfg.n_t = o.nt;
  if (o.tmax > 0.0) cfg.t_max = o.tmax;
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary stabilization experiments for a complex Ginzburg-Landau model"};
  app.require_subcommand(1);

  CommonOpts run_o, adm_o, rate_o, cross_o;
  CLI::App* run_cmd = app.add_subcommand("run", "march an experiment and record its histories");
  add_common(run_cmd, run_o);
  CLI::App* adm_cmd = app.add_subcommand("admissibility", "tabulate mode determinants");
  add_common(adm_cmd, adm_o);
  CLI::App* rate_cmd = app.add_subcommand("rateplan", "report the decay-rate plan");
  add_common(rate_cmd, rate_o);
  CLI::App* cross_cmd =
      app.add_subcommand("crosscheck", "compare the stepper against the contour evaluator");
  add_common(cross_cmd, cross_o);
  app.add_subcommand("selftest", "fast internal consistency sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "cglstab: error: config: " << e.what() << "\n";
    return 2;
  }

  try {
    if (run_cmd->parsed()) return cglstab::cmd_run(resolve(run_o), std::cout);
    if (adm_cmd->parsed()) return cglstab::cmd_admissibility(resolve(adm_o), std::cout);
    if (rate_cmd->parsed()) return cglstab::cmd_rateplan(resolve(rate_o), std::cout);
    if (cross_cmd->parsed()) return cglstab::cmd_crosscheck(resolve(cross_o), std::cout);
    return cglstab::cmd_selftest(std::cout);
  } catch (const cglstab::Error& e) {
    std::cerr << "cglstab: error: " << e.category() << ": " << e.what() << "\n";
    return cglstab::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "cglstab: error: internal: " << e.what() << "\n";
    return 2;
  }
}
