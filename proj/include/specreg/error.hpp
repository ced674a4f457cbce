#pragma once

#include <stdexcept>
#include <string>

namespace specreg {

// Bad input, violated precondition or malformed configuration.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation that cannot produce a meaningful result for valid-looking input
// (degenerate design, infeasible grid floor, root solver failure, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specreg
