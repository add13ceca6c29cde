#pragma once

#include <stdexcept>
#include <string>

namespace bpfsim {

/// Invalid or inconsistent run configuration. Carries the offending line of
/// the config text when one is known (0 otherwise).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

/// Numerical failure: non-finite values, pointwise blow-up, collapsed time step.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model invariant was violated beyond its hard threshold.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bpfsim
