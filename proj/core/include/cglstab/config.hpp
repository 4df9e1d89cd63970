#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cglstab/discretization.hpp"
#include "cglstab/solver.hpp"

namespace cglstab {

struct InitialSpec {
  std::string kind = "preset"; // preset | sine | modes
  int sine_k = 1;              // sin(k pi x / L)
  std::vector<double> re, im;  // eigenmode coefficients, mode j = entry j-1
};

struct CrosscheckSpec {
  std::vector<double> xs, ts;
  double tolerance = 0.01;
  double r_max = -1.0;
  int n_quad = -1;
};

struct AdmissibilitySweep {
  std::vector<double> mu_values; // empty: params.mu only
  std::vector<double> n_values;  // empty: params.n_modes only
};

// Fully resolved experiment description. Serialization is canonical
// (fixed key order, %.17g numbers) so its FNV-1a hash identifies a run.
struct ExperimentConfig {
  std::string preset = "custom"; // exp1 | exp2 | custom
  std::string plant = "linear";  // linear | nonlinear | uncontrolled
  bool control = true;
  std::string rate_mode = "minimal"; // minimal | rapid
  std::uint64_t seed = 0;
  PhysParams params;
  int n_x = 201;
  int n_t = 2001;
  double t_max = 1.0;
  InitialSpec initial;
  bool weighted_projection = true;
  double fit_t0 = -1.0; // < 0: 0.2 t_max
  double fit_t1 = -1.0; // < 0: 0.8 t_max
  std::string out_dir = "out";
  CrosscheckSpec crosscheck;
  AdmissibilitySweep admissibility;

  bool control_enabled() const { return plant != "uncontrolled" && control; }
  Plant effective_plant() const;
  double resolved_fit_t0() const { return fit_t0 < 0.0 ? 0.2 * t_max : fit_t0; }
  double resolved_fit_t1() const { return fit_t1 < 0.0 ? 0.8 * t_max : fit_t1; }
};

// Baseline for a preset name ("exp1", "exp2", "custom").
ExperimentConfig default_config(const std::string& preset);

// Strict TOML-subset reader: [section] headers, key = value with
// strings, booleans, numbers and flat numeric arrays. Unknown sections
// or keys, duplicates, and type mismatches all raise ConfigError. The
// preset key is applied first (wherever it appears); every other key
// then overrides the preset baseline in file order.
ExperimentConfig parse_config(const std::string& text);

// Throws ConfigError on enum violations, bad grids, or bad parameters.
void validate_config(const ExperimentConfig& cfg);

std::string serialize_config(const ExperimentConfig& cfg);

// Hash of the canonical serialization with the output directory
// blanked: the same experiment hashes the same wherever it is written.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// Initial state on the grid per cfg.initial (presets need cfg.preset).
ComplexField build_initial_state(const ExperimentConfig& cfg, const Grid& g);

} // namespace cglstab
