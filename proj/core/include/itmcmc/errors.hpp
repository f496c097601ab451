#pragma once

#include <stdexcept>
#include <string>

namespace itmcmc {

/// Invalid run configuration (bad parameters, non-SPD proposal, malformed
/// config file). Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric or runtime failure while a run is in progress. Maps to CLI exit
/// code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace itmcmc
