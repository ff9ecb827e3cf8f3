#pragma once

#include <stdexcept>
#include <string>

namespace hexcombat {

// Error categories shared by the C++ core and the C API status codes.
enum class ErrorCode {
  invalid_argument = 1,
  illegal_action = 2,
  invalid_state = 3,
  io = 4,
  protocol = 5,
  timeout = 6,
  verification = 7,
  internal = 8,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code) noexcept;

}  // namespace hexcombat
