#pragma once

#include <stdexcept>
#include <string>

namespace t4d {

// Bad or inconsistent input: parse failures, invariant violations,
// mismatched topologies. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: eigensolver non-convergence, degenerate systems.
// Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace t4d
