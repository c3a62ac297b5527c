#pragma once

#include <stdexcept>
#include <string>

namespace dmpm {

/// Raised when the simulated state leaves the domain of validity.
class SimulationError : public std::runtime_error {
 public:
  enum class Kind { kBoundaryViolation, kInversion, kNonFinite };

  SimulationError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

  /// Step index at which the failure occured, or -1 when not inside a rollout.
  long step() const { return step_; }
  void set_step(long step) { step_ = step; }

 private:
  Kind kind_;
  long step_ = -1;
};

/// Invalid configuration or parameters (bad material, missing control
/// channel, malformed config file, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline const char* to_string(SimulationError::Kind kind) {
  switch (kind) {
    case SimulationError::Kind::kBoundaryViolation:
      return "boundary violation";
    case SimulationError::Kind::kInversion:
      return "inversion";
    case SimulationError::Kind::kNonFinite:
      return "non-finite value";
  }
  return "unknown";
}

}  // namespace dmpm
