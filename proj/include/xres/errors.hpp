#pragma once

#include <stdexcept>
#include <string>

namespace xres {

// Argument outside the supported evaluation range.
struct RangeError : std::out_of_range {
  explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

// Mathematically undefined input (e.g. Gamma at a pole, equal Airy scales).
struct DomainError : std::domain_error {
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Quadrature, ODE or iteration failure.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Model fails the sign/derivative assumptions at construction time.
struct ModelError : std::invalid_argument {
  explicit ModelError(const std::string& what) : std::invalid_argument(what) {}
};

// Unreadable or inconsistent configuration file.
struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// No turning point inside the local chart.
struct ChartError : NumericError {
  explicit ChartError(const std::string& what) : NumericError(what) {}
};

// Neumann series does not contract.
struct ConvergenceError : NumericError {
  double ratio;
  ConvergenceError(const std::string& what, double r) : NumericError(what), ratio(r) {}
};

// Linear system too ill-conditioned to trust.
struct ConditioningError : NumericError {
  double condition;
  ConditioningError(const std::string& what, double c) : NumericError(what), condition(c) {}
};

}  // namespace xres
