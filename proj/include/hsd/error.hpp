#pragma once

#include <stdexcept>
#include <string>

namespace hsd {

// Malformed or inconsistent input: wrong dimensions, invalid states,
// out-of-range parameters. The CLI maps this to exit status 1.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// The conic solver could not certify an optimum. The CLI maps this to
// exit status 2.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hsd
