#pragma once

#include <stdexcept>
#include <string>

namespace spreadcast {

enum class ErrorKind {
  InvalidArgument,
  Io,
  Parse,
  DimensionMismatch,
  MissingValues,
  RankDeficient,
  Diverged,
  Format,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type thrown by the library. The kind lets callers
/// (and the CLI exit-code mapping) distinguish failure classes without
/// parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace spreadcast
