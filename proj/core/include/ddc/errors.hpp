#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ddc {

/// Thrown when inputs violate a documented precondition (bad dimensions,
/// disconnected graph, indefinite weights, malformed configuration, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure fails: divergence, non-convergence
/// within the allotted horizon, or a singular linear system.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what,
                          std::vector<double> history = {})
      : std::runtime_error(what), history_(std::move(history)) {}

  /// Diagnostic trace attached by the thrower, e.g. the residual history of
  /// a flow that failed to converge. May be empty.
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace ddc
