#pragma once

#include <stdexcept>
#include <string>

namespace dampsim {

/// Bad input: malformed configuration, violated precondition, broken invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that was set up correctly but could not deliver the
/// requested accuracy (quadrature non-convergence, non-finite results).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The solution left the representable range (non-finite values or the
/// configured sup-norm threshold) at `time`.
class BlowUpError : public NumericalError {
 public:
  BlowUpError(const std::string& what, double time) : NumericalError(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace dampsim
