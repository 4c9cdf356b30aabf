#pragma once

#include <stdexcept>
#include <string>

namespace dmas {

/// Inconsistent matrix/vector sizes between model, graph and controller.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (eigen-solver, Riccati iteration, singular solve).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario configuration rejected. `path()` names the offending field, e.g.
/// `attacks[1].signal.omega`.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace dmas
