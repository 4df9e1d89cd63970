#pragma once

#include <stdexcept>
#include <string>

namespace cglstab {

// Every failure the library can produce maps to one of these categories.
// The category string is stable; the CLI prints it as part of a single-line
// machine-parsable error and derives the process exit code from it:
//   config/domain/dimension/resolution/rate/window -> 2
//   inadmissible                                   -> 3
//   solve/nonconvergence                           -> 4
class Error : public std::runtime_error {
public:
  Error(std::string category, const std::string& msg)
      : std::runtime_error(msg), category_(std::move(category)) {}
  const std::string& category() const { return category_; }

private:
  std::string category_;
};

// Bad or inconsistent user-supplied configuration.
struct ConfigError : Error {
  explicit ConfigError(const std::string& m) : Error("config", m) {}
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  explicit DomainError(const std::string& m) : Error("domain", m) {}
};

// Mismatched vector/matrix/grid sizes.
struct DimensionError : Error {
  explicit DimensionError(const std::string& m) : Error("dimension", m) {}
};

// Grid too coarse for the requested mode count or stencil.
struct ResolutionError : Error {
  explicit ResolutionError(const std::string& m) : Error("resolution", m) {}
};

// A rate plan could not be formed (nonpositive predicted rate, gain
// outside its admissible interval, ...).
struct InvalidRateError : Error {
  explicit InvalidRateError(const std::string& m) : Error("rate", m) {}
};

// Bad fitting window for decay-rate estimation.
struct WindowError : Error {
  explicit WindowError(const std::string& m) : Error("window", m) {}
};

// An evaluation would overflow double range.
struct RangeError : Error {
  explicit RangeError(const std::string& m) : Error("range", m) {}
};

// A mode determinant fell below the admissibility floor; carries the
// offending 1-based mode index.
class InadmissibleError : public Error {
public:
  InadmissibleError(int mode, double abs_d, const std::string& m)
      : Error("inadmissible", m), mode_(mode), abs_d_(abs_d) {}
  int mode() const { return mode_; }
  double abs_d() const { return abs_d_; }

private:
  int mode_;
  double abs_d_;
};

// Linear solve hit a (numerically) singular pivot; carries its magnitude.
class SolveError : public Error {
public:
  SolveError(double pivot, const std::string& m)
      : Error("solve", m), pivot_(pivot) {}
  double pivot() const { return pivot_; }

private:
  double pivot_;
};

// An iteration exhausted its cap; carries the last residual measure.
class NonConvergenceError : public Error {
public:
  NonConvergenceError(double residual, const std::string& m)
      : Error("nonconvergence", m), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

// Contour quadrature walked into a denominator zero.
struct SingularityError : Error {
  explicit SingularityError(const std::string& m) : Error("singularity", m) {}
};

inline int exit_code_for(const Error& e) {
  const std::string& c = e.category();
  if (c == "inadmissible") return 3;
  if (c == "solve" || c == "nonconvergence" || c == "singularity") return 4;
  return 2;
}

} // namespace cglstab
