#include "hexcombat/error.hpp"

namespace hexcombat {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::illegal_action: return "illegal_action";
    case ErrorCode::invalid_state: return "invalid_state";
    case ErrorCode::io: return "io";
    case ErrorCode::protocol: return "protocol";
    case ErrorCode::timeout: return "timeout";
    case ErrorCode::verification: return "verification";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

}  // namespace hexcombat
