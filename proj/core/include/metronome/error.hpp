#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace metronome {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Offered load at or above the service rate where a formula divides by 1-rho.
class StabilityError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Carries every problem found while parsing or validating a scenario,
// each already prefixed with its line number where one applies.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : Error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out;
    for (const auto& i : issues) {
      if (!out.empty()) out += '\n';
      out += i;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace metronome
