#pragma once

#include <stdexcept>
#include <string>

namespace ridgeshift {

/// Rejected input: invalid spectrum, shift, penalty, grid or dimension.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a trustworthy result
/// (fixed point not converged, optimizer pinned to its bracket, singular solve).
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what, double last_residual = 0.0)
      : std::runtime_error(what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace ridgeshift
