#pragma once

#include <stdexcept>
#include <string>

namespace magnls {

/// Malformed input: bad shapes, out-of-range parameters, unreadable files.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical precondition of the requested computation does not hold
/// (e.g. a minimization problem the theory says has no minimizer).
class PreconditionRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The discretization or an iteration failed to deliver a trustworthy result.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace magnls
