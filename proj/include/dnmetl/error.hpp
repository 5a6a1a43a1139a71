#pragma once

#include <stdexcept>
#include <string>

namespace dnm {

/// Bad command line or configuration.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Missing or malformed input data or stage artifacts.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dnm
