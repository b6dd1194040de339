#pragma once

#include <stdexcept>
#include <string>

namespace cramsnn {

/// Failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
  InvalidArgument,
  OutOfRange,
  Device,
  Config,
  Routing,
  Io,
  Invariant,
  Output,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const char* what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace cramsnn
