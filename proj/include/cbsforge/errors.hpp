#pragma once

#include <stdexcept>
#include <string>

namespace cbsforge {

// Mirrors the C status codes in cbsforge.h; keep the numeric values in sync.
enum class ErrorCode : int {
  index_error = 1,
  shape_mismatch = 2,
  resource_exceeded = 3,
  domain_error = 4,
  precondition_failed = 5,
  numerical_integrity = 6,
  parse_error = 7,
  io_error = 8,
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

}  // namespace cbsforge
