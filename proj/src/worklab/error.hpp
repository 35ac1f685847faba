#pragma once

#include <stdexcept>
#include <string>

namespace worklab {

enum class ErrorCode {
  invalid_argument = 1,
  domain = 2,
  cap_exceeded = 3,
  parse = 4,
  validation = 5,
};

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

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::invalid_argument, what);
}

}  // namespace worklab
