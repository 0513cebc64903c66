#pragma once

#include <stdexcept>
#include <string>

namespace imclean {

/// Base class for all imclean errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Violated precondition or invalid argument value.
struct ValueError : Error {
  explicit ValueError(const std::string& msg) : Error(msg) {}
};

/// File format or filesystem failure.
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Invalid or inconsistent run configuration.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// A restorer modified data outside the mask.
struct ContractViolation : Error {
  explicit ContractViolation(const std::string& msg) : Error(msg) {}
};

}  // namespace imclean
