#pragma once

#include <stdexcept>
#include <string>

namespace pcdeer {

// Base class for all library errors.
struct error : std::runtime_error {
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input (CLI exit code 1).
struct validation_error : error {
  explicit validation_error(const std::string& msg) : error(msg) {}
};

// Broken internal invariant or contract violation (CLI exit code 2).
struct contract_error : error {
  explicit contract_error(const std::string& msg) : error(msg) {}
};

}  // namespace pcdeer
