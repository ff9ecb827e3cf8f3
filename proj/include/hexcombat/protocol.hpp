#pragma once

// Learner protocol: one JSON object per line in each direction.
//
//   {"op":"reset","size":5,"seed":1,"role":"blue","obs_mode":"local"}
//   {"op":"step","action":3}
//   {"op":"replay"}
//   {"op":"close"}
//
// Replies are {"ok":true,...} or {"ok":false,"error":{"code":..,"message":..}}.
// Keys are emitted sorted, so identical inputs give byte-identical replies.

#include <string>
#include <string_view>

#include "hexcombat/json_io.hpp"
#include "hexcombat/replay.hpp"
#include "hexcombat/session.hpp"

namespace hexcombat {

enum class TensorEncoding { json, f32le };

/// Reads reset parameters. Unknown keys are ignored; bad values throw Error.
EpisodeParams episode_params_from_json(const Json& j);

Json step_result_to_json(const StepResult& r, TensorEncoding encoding);

Json error_reply(ErrorCode code, std::string_view message);

/// State machine for one learner connection.
class ProtocolHandler {
 public:
  explicit ProtocolHandler(const ReplayStore* store = nullptr) : store_(store) {}

  /// Handles one request line and returns the reply line (no newline).
  /// Never throws for bad input.
  std::string handle(std::string_view line);

  bool closed() const noexcept { return closed_; }
  const EnvSession& session() const noexcept { return session_; }

 private:
  Json dispatch(const Json& request);
  Json on_reset(const Json& request);
  Json on_step(const Json& request);
  Json on_replay();

  const ReplayStore* store_;
  EnvSession session_;
  TensorEncoding encoding_ = TensorEncoding::json;
  std::optional<std::string> stored_replay_;
  bool closed_ = false;
};

}  // namespace hexcombat
