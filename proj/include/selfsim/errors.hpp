#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

// Malformed input: a spec that violates its own structural invariants
// (non-increasing partition, |d| >= 1, bad array lengths, unparseable file).
// Distinct from a *failed validation*, which is a regular result.
struct spec_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A well-formed request that cannot be answered: invalid measure passed to
// atoms(), too few points for a fit, lambda below the trusted range, ...
struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative solver exhausted its budget.
struct convergence_error : std::runtime_error {
  double residual;
  convergence_error(const std::string& msg, double res)
      : std::runtime_error(msg), residual(res) {}
};

// Quadrature finished but the node-doubling estimate missed the tolerance.
struct quadrature_error : std::runtime_error {
  double achieved;  // estimated relative error
  quadrature_error(const std::string& msg, double est)
      : std::runtime_error(msg), achieved(est) {}
};

}  // namespace selfsim
