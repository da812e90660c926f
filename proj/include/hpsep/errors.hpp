#pragma once

#include <stdexcept>

namespace hpsep {

/// Invalid argument or configuration value.
struct ParamError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Filesystem-level failure (missing file, unwritable path).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed file content.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A persisted artifact does not match the code loading it.
struct VersionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hpsep
