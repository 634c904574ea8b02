#pragma once

#include <stdexcept>
#include <string>

namespace lpvff {

/// Bad arguments or malformed objects (lengths, signs, domains).
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Configuration file problems: unknown keys, unparsable values, missing files.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure: factorization breakdown, singular systems, non-finite results.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Planning failure: infeasible stroke or sample budget exceeded.
struct PlanningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Simulation divergence. Carries the first sample index where the state bound broke.
struct InstabilityError : std::runtime_error {
  InstabilityError(const std::string& msg, long sample)
      : std::runtime_error(msg), first_divergent_sample(sample) {}
  long first_divergent_sample;
};

}  // namespace lpvff
