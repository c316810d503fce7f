#pragma once

#include <stdexcept>
#include <string>

namespace mot {

// Malformed or inconsistent input data (files, configuration, arguments).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine could not produce a valid result (singular matrix,
// non-PSD covariance, degenerate geometry).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition (empty bank, empty trajectory).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mot
