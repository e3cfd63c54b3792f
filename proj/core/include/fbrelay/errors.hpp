#pragma once

#include <stdexcept>
#include <string>

namespace fbrelay {

/// Invalid scenario or settings. Maps to CLI exit status 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An evaluator could not reach its accuracy target. Maps to CLI exit status 3.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double value, double error_estimate)
      : std::runtime_error(what + " (value=" + std::to_string(value) +
                           ", error_estimate=" + std::to_string(error_estimate) + ")"),
        value_(value),
        error_estimate_(error_estimate) {}

  double value() const noexcept { return value_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double value_;
  double error_estimate_;
};

}  // namespace fbrelay
