#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bqp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or otherwise corrupted field data.
class DataIntegrityError : public Error {
 public:
  using Error::Error;
};

/// A caller supplied an argument outside the operation's contract.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Time step could not be completed (CFL violation after all halvings).
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double t, double dt, double max_speed)
      : Error(what), t(t), dt(dt), max_speed(max_speed) {}
  double t;
  double dt;
  double max_speed;
};

/// A Lagrangian marker left the central region where periodic truncation is trusted.
class DomainTruncationError : public Error {
 public:
  using Error::Error;
};

/// Curve tangent vanished; the boundary parametrization degenerated.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key + ": " + message), key(std::move(key)) {}
  std::string key;
};

/// Non-fatal notices collected by operations that tolerate slightly bad input.
struct WarningLog {
  std::vector<std::string> entries;
  void add(std::string message) { entries.push_back(std::move(message)); }
  bool empty() const { return entries.empty(); }
};

}  // namespace bqp
