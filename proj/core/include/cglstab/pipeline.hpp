#pragma once

#include <iosfwd>

#include "cglstab/config.hpp"

namespace cglstab {

// Subcommand bodies shared by the CLI and the tests. Each writes its
// reports under cfg.out_dir (created if needed) and returns the process
// exit code; typed errors propagate to the caller. Every CSV written
// starts with a comment carrying the hash of the fully resolved config,
// and all numeric output is %.17g, so identical configs give identical
// bytes.

// norms.csv, final_state.csv, rateplan.txt, admissibility.csv (when the
// control path is active), summary.txt.
int cmd_run(const ExperimentConfig& cfg, std::ostream& log);

// admissibility.csv over the configured mu/n_modes sweep (the bare
// configured pair when no sweep is given). Exit 3 only when the
// configured base pair itself is inadmissible.
int cmd_admissibility(const ExperimentConfig& cfg, std::ostream& log);

// rateplan.txt for cfg.rate_mode.
int cmd_rateplan(const ExperimentConfig& cfg, std::ostream& log);

// crosscheck.csv comparing the time stepper against the contour
// evaluator on the configured lattice; exit 5 when the worst relative
// error exceeds the configured tolerance.
int cmd_crosscheck(const ExperimentConfig& cfg, std::ostream& log);

// Fast internal consistency sweep, no config or output directory.
int cmd_selftest(std::ostream& log);

} // namespace cglstab
