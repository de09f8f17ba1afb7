#pragma once

#include <stdexcept>
#include <string>

namespace ispec {

// Numerical failure inside a solver (as opposed to bad input).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ispec
