#include "hexcombat/protocol.hpp"

#include <cmath>
#include <limits>

#include "hexcombat/error.hpp"

namespace hexcombat {

namespace {

const Json& require(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::protocol, std::string("missing field '") + key + "'");
  return *it;
}

std::uint64_t read_seed(const Json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  throw Error(ErrorCode::protocol, "seed must be a non-negative integer");
}

int read_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw Error(ErrorCode::protocol, std::string(what) + " must be an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw Error(ErrorCode::protocol, std::string(what) + " out of range");
  }
  return static_cast<int>(v);
}

std::string read_string(const Json& j, const char* what) {
  if (!j.is_string()) throw Error(ErrorCode::protocol, std::string(what) + " must be a string");
  return j.get<std::string>();
}

TensorEncoding parse_encoding(const std::string& s) {
  if (s == "json") return TensorEncoding::json;
  if (s == "f32le") return TensorEncoding::f32le;
  throw Error(ErrorCode::protocol, "unknown encoding '" + s + "'");
}

}  // namespace

EpisodeParams episode_params_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::protocol, "reset parameters must be an object");
  EpisodeParams p;
  if (const auto it = j.find("scenario"); it != j.end()) {
    try {
      p.scenario = it->get<ScenarioSpec>();
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::protocol, std::string("bad scenario: ") + e.what());
    }
  } else if (const auto it2 = j.find("size"); it2 != j.end()) {
    p.size = read_int(*it2, "size");
  } else {
    throw Error(ErrorCode::protocol, "reset needs 'size' or 'scenario'");
  }
  if (const auto it = j.find("seed"); it != j.end()) p.seed = read_seed(*it);
  if (const auto it = j.find("role"); it != j.end()) p.role = parse_faction(read_string(*it, "role"));
  if (const auto it = j.find("obs_mode"); it != j.end()) {
    p.obs_mode = parse_obs_mode(read_string(*it, "obs_mode"));
  }
  if (const auto it = j.find("opponent"); it != j.end()) {
    p.opponent = read_string(*it, "opponent");
    validate_agent_spec(p.opponent);
  }
  if (const auto it = j.find("illegal_action"); it != j.end()) {
    const std::string mode = read_string(*it, "illegal_action");
    if (mode == "error") {
      p.illegal = IllegalActionMode::error;
    } else if (mode == "pass") {
      p.illegal = IllegalActionMode::pass;
    } else {
      throw Error(ErrorCode::protocol, "illegal_action must be 'error' or 'pass'");
    }
  }
  if (const auto it = j.find("terminal_bonus"); it != j.end()) {
    if (!it->is_number()) throw Error(ErrorCode::protocol, "terminal_bonus must be a number");
    p.reward.terminal_bonus = it->get<double>();
    if (!std::isfinite(p.reward.terminal_bonus)) {
      throw Error(ErrorCode::protocol, "terminal_bonus must be finite");
    }
  }
  p.reward.validate();
  return p;
}

Json step_result_to_json(const StepResult& r, TensorEncoding encoding) {
  Json info{{"raw_score_delta", r.info.raw_score_delta},
            {"total_score", r.info.total_score},
            {"legal_mask", legal_mask_json(r.info.legal_mask)},
            {"phase", r.info.phase},
            {"illegal", r.info.illegal},
            {"unit", r.info.unit ? Json(*r.info.unit) : Json(nullptr)},
            {"reason", to_string(r.info.reason)}};
  return Json{{"ok", true},
              {"observation", encoding == TensorEncoding::f32le ? tensor_to_json_f32le(r.observation)
                                                                : tensor_to_json(r.observation)},
              {"reward", r.reward},
              {"terminal", r.terminal},
              {"info", std::move(info)}};
}

Json error_reply(ErrorCode code, std::string_view message) {
  return Json{{"ok", false}, {"error", {{"code", error_code_name(code)}, {"message", message}}}};
}

std::string ProtocolHandler::handle(std::string_view line) {
  Json reply;
  Json id;
  try {
    const Json request = parse_json_line(line);
    if (!request.is_object()) throw Error(ErrorCode::protocol, "request must be a JSON object");
    if (const auto it = request.find("id"); it != request.end()) id = *it;
    reply = dispatch(request);
  } catch (const IllegalRemoteAction& e) {
    reply = error_reply(e.code(), e.what());
  } catch (const Error& e) {
    reply = error_reply(e.code(), e.what());
    if (e.code() == ErrorCode::illegal_action && session_.started() && !session_.terminal()) {
      const auto unit = session_.match().controlled_unit();
      if (unit) reply["error"]["legal_mask"] = legal_mask_json(legal_mask(session_.match().state(), *unit));
    }
  } catch (const Json::exception& e) {
    reply = error_reply(ErrorCode::protocol, e.what());
  } catch (const std::exception& e) {
    reply = error_reply(ErrorCode::internal, e.what());
  }
  if (!id.is_null()) reply["id"] = id;
  return reply.dump(-1, ' ', false, Json::error_handler_t::replace);
}

Json ProtocolHandler::dispatch(const Json& request) {
  if (closed_) throw Error(ErrorCode::invalid_state, "session is closed");
  const std::string op = read_string(require(request, "op"), "op");
  if (op == "reset") return on_reset(request);
  if (op == "step") return on_step(request);
  if (op == "replay") return on_replay();
  if (op == "close") {
    closed_ = true;
    return Json{{"ok", true}, {"closed", true}};
  }
  throw Error(ErrorCode::protocol, "unknown op '" + op + "'");
}

Json ProtocolHandler::on_reset(const Json& request) {
  const EpisodeParams params = episode_params_from_json(request);
  TensorEncoding encoding = TensorEncoding::json;
  if (const auto it = request.find("encoding"); it != request.end()) {
    encoding = parse_encoding(read_string(*it, "encoding"));
  }
  const StepResult r = session_.reset(params);
  encoding_ = encoding;
  stored_replay_.reset();
  Json reply = step_result_to_json(r, encoding_);
  if (r.terminal && store_ != nullptr) {
    std::string stored;
    session_.record_replay(store_, &stored);
    stored_replay_ = stored;
    reply["info"]["replay_id"] = stored;
  }
  return reply;
}

Json ProtocolHandler::on_step(const Json& request) {
  const ActionIndex action = read_int(require(request, "action"), "action");
  const StepResult r = session_.step(action);
  Json reply = step_result_to_json(r, encoding_);
  if (r.terminal && store_ != nullptr) {
    std::string stored;
    session_.record_replay(store_, &stored);
    stored_replay_ = stored;
    reply["info"]["replay_id"] = stored;
  }
  return reply;
}

Json ProtocolHandler::on_replay() {
  const ReplayDocument doc = session_.record_replay();
  Json reply{{"ok", true}, {"replay", doc}, {"replay_id", replay_id(doc)}};
  reply["stored"] = stored_replay_.has_value();
  return reply;
}

}  // namespace hexcombat
