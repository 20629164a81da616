#pragma once

#include <stdexcept>
#include <string>

namespace vskf {

/// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Violated precondition or inconsistent arguments (caller bug).
class ContractError : public Error {
public:
  using Error::Error;
};

/// Invalid or inconsistent configuration values.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// File-format or filesystem failure.
class IoError : public Error {
public:
  using Error::Error;
};

/// Numerical failure (ill-conditioning, divergence, degenerate input).
class NumericError : public Error {
public:
  using Error::Error;
};

/// Factorization failed even after diagonal jitter; carries a condition estimate.
class IllConditionedError : public NumericError {
public:
  IllConditionedError(const std::string& what, double cond_estimate)
      : NumericError(what), cond_estimate(cond_estimate) {}
  double cond_estimate;
};

/// Non-finite values appeared during an iteration; carries the iteration index.
class DivergenceError : public NumericError {
public:
  DivergenceError(const std::string& what, int iteration)
      : NumericError(what), iteration(iteration) {}
  int iteration;
};

}  // namespace vskf
