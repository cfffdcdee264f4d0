#pragma once

#include <stdexcept>

namespace irbmr {

// Bad user input: malformed files, out-of-range configuration, inconsistent
// panels. Maps to CLI exit code 2. Numerical failures use std::domain_error
// or std::runtime_error and map to exit code 3.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem problems: missing or unreadable/unwritable paths. Exit code 4.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace irbmr
