#pragma once

#include <stdexcept>
#include <string>

namespace blowup {

// Precondition violations on user-supplied parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation ran but could not meet its accuracy or consistency contract
// (non-convergence, drift, route disagreement, lost bracket, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blowup
