#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rockperm {

/// Malformed input file (wrong size, bad header, unparsable field).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller-supplied value outside the documented domain of an operation.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input violates an operation precondition (e.g. meshing a non-percolating grid).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StatisticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inflow and outflow mean pressures coincide to round-off; Darcy's law is undefined.
class DegeneratePressureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// MINRES hit its iteration cap. Carries the residual history for diagnostics.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history_(std::move(history)) {}

  const std::vector<double>& residual_history() const noexcept { return residual_history_; }

 private:
  std::vector<double> residual_history_;
};

}  // namespace rockperm
