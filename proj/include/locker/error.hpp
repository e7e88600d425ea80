#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace locker {

enum class ErrorKind {
  Io,
  Parse,
  EmptyDataset,
  Domain,
  Parameter,
  Index,
  Numeric,
  Singular,
  Usage,
  Benchmark,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind drives
/// the CLI exit-code mapping.
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

}  // namespace locker
