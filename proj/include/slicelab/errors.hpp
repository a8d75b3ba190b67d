#pragma once

#include <stdexcept>
#include <string>

namespace slicelab {

/// Thrown when a checked mathematical invariant fails at run time. The CLI
/// maps it to exit code 5.
class AssertionFailure : public std::logic_error {
 public:
  explicit AssertionFailure(const std::string& what) : std::logic_error(what) {}
};

/// Thrown when an exact computation would exceed the enumeration cap.
class CapExceeded : public std::invalid_argument {
 public:
  explicit CapExceeded(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace slicelab
