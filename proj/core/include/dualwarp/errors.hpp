#pragma once

#include <stdexcept>
#include <string>

namespace dualwarp {

/// Precondition or argument violation. Maps to CLI exit code 1.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed file contents. Maps to CLI exit code 2.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failure (unreadable input, unwritable output directory).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Completion requested on an image without a single known pixel.
class NoValidSource : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dualwarp
