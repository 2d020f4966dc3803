#pragma once

#include <stdexcept>
#include <string>

namespace dci {

/// Base error for every failure this library reports. The message always
/// carries enough context (file, line number, field name) to act on.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input files, schemas, and config values that fail validation.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

/// Filesystem problems: missing paths, unwritable directories, timeouts.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace dci
