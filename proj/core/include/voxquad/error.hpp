#pragma once

#include <stdexcept>
#include <string>

namespace voxquad {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad arguments, inconsistent dimensions, bad files.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Raised when an iterative or adaptive procedure exhausts its budget.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what), best_residual_(best_residual) {}

  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

}  // namespace voxquad
