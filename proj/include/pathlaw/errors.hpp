#pragma once

#include <stdexcept>
#include <string>

namespace pathlaw {

// Argument outside the mathematical domain of an operation (time off [0,t],
// non-positive scale, mismatched horizons, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string &what) : std::domain_error(what) {}
};

// Bad configuration: unknown identity name, off-grid marginal, too few samples.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string &what) : std::invalid_argument(what) {}
};

// A documented hypothesis of an operation does not hold for the input.
class PreconditionError : public std::logic_error {
 public:
  explicit PreconditionError(const std::string &what) : std::logic_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string &what) : std::runtime_error(what) {}
};

}  // namespace pathlaw
