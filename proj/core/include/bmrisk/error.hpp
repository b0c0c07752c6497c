#pragma once

#include <stdexcept>
#include <string>

namespace bmrisk {

// Error categories map one-to-one onto the CLI exit codes.

/// Invalid configuration or command-line input (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed, missing or inconsistent input data (exit code 3).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine could not produce a finite, meaningful result (exit code 4).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

enum class ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kDataError = 3,
  kNumericalFailure = 4,
};

/// Prefixes an exception message with the pipeline stage that raised it,
/// preserving the error category.
[[noreturn]] void rethrow_with_stage(const std::string& stage);

}  // namespace bmrisk
