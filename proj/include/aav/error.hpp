#pragma once

#include <stdexcept>
#include <string>

namespace aav {

enum class ErrorCode {
  InvalidArgument = 1,
  OutOfRange = 2,
  Parse = 3,
  Io = 4,
  State = 5,
  Protocol = 6,
};

/// Exception type thrown by every aav component. The code maps 1:1 onto
/// the status values of the C API.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace aav
