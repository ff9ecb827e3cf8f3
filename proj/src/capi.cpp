#include "hexcombat/hexcombat.h"

#include <cstring>
#include <string>

#include "hexcombat/eval.hpp"
#include "hexcombat/observation.hpp"
#include "hexcombat/protocol.hpp"
#include "hexcombat/server.hpp"

using namespace hexcombat;

struct hxc_protocol {
  std::optional<ReplayStore> store;
  std::unique_ptr<ProtocolHandler> handler;
};

struct hxc_env {
  EnvSession session;
};

struct hxc_server {
  std::unique_ptr<Server> server;
};

namespace {

thread_local std::string last_error;

hxc_status fail(hxc_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <typename F>
hxc_status guard(F&& body) noexcept {
  try {
    body();
    return HXC_OK;
  } catch (const Error& e) {
    return fail(static_cast<hxc_status>(e.code()), e.what());
  } catch (const Json::exception& e) {
    return fail(HXC_PROTOCOL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(HXC_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HXC_INTERNAL, e.what());
  } catch (...) {
    return fail(HXC_INTERNAL, "unknown error");
  }
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void require(bool ok, const char* message) {
  if (!ok) throw Error(ErrorCode::invalid_argument, message);
}

void fill(const StepResult& r, float* obs, std::size_t capacity, hxc_step_info* info) {
  const auto shape = r.observation.shape();
  info->reward = r.reward;
  info->terminal = r.terminal ? 1 : 0;
  info->illegal = r.info.illegal ? 1 : 0;
  info->raw_score_delta = r.info.raw_score_delta;
  info->total_score = r.info.total_score;
  info->phase = r.info.phase;
  info->unit = r.info.unit ? *r.info.unit : -1;
  for (int k = 0; k < kActionCount; ++k) info->legal_mask[k] = r.info.legal_mask[k] ? 1 : 0;
  info->obs_channels = shape[0];
  info->obs_rows = shape[1];
  info->obs_cols = shape[2];
  if (obs == nullptr) return;
  const auto data = r.observation.data();
  if (capacity < data.size()) {
    throw Error(ErrorCode::invalid_argument,
                "observation buffer too small: need " + std::to_string(data.size()) + " floats");
  }
  for (std::size_t i = 0; i < data.size(); ++i) obs[i] = static_cast<float>(data[i]);
}

std::optional<std::string> opt_string(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

extern "C" {

const char* hxc_version(void) { return "1.0.0"; }

const char* hxc_status_name(hxc_status status) {
  if (status == HXC_OK) return "ok";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* hxc_last_error(void) { return last_error.c_str(); }

void hxc_string_free(char* s) { std::free(s); }

hxc_status hxc_decay_weight(double distance, double* out) {
  return guard([&] {
    require(out != nullptr, "out is null");
    *out = decay_weight(distance);
  });
}

hxc_status hxc_localize(const double* global, int rows, int cols, int agent_row, int agent_col,
                        double* out) {
  return guard([&] {
    require(global != nullptr && out != nullptr, "null buffer");
    require(rows > 0 && cols > 0, "board dimensions must be positive");
    ObservationTensor g(kChannels, rows, cols);
    std::memcpy(g.data().data(), global, g.data().size() * sizeof(double));
    const ObservationTensor local = localize(g, {agent_row, agent_col});
    std::memcpy(out, local.data().data(), local.data().size() * sizeof(double));
  });
}

hxc_status hxc_scenario_generate(int size, uint64_t seed, char** json_out) {
  return guard([&] {
    require(json_out != nullptr, "json_out is null");
    *json_out = duplicate(Json(generate(size, seed)).dump());
  });
}

hxc_status hxc_protocol_create(const char* replay_dir, hxc_protocol** out) {
  return guard([&] {
    require(out != nullptr, "out is null");
    auto p = std::make_unique<hxc_protocol>();
    if (replay_dir != nullptr) p->store.emplace(replay_dir);
    p->handler = std::make_unique<ProtocolHandler>(p->store ? &*p->store : nullptr);
    *out = p.release();
  });
}

hxc_status hxc_protocol_handle(hxc_protocol* p, const char* line, char** reply) {
  return guard([&] {
    require(p != nullptr && line != nullptr && reply != nullptr, "null argument");
    *reply = duplicate(p->handler->handle(line));
  });
}

int hxc_protocol_closed(const hxc_protocol* p) { return p != nullptr && p->handler->closed() ? 1 : 0; }

void hxc_protocol_destroy(hxc_protocol* p) { delete p; }

hxc_status hxc_env_create(hxc_env** out) {
  return guard([&] {
    require(out != nullptr, "out is null");
    *out = new hxc_env();
  });
}

hxc_status hxc_env_reset(hxc_env* env, const char* params_json, float* obs, size_t obs_capacity,
                         hxc_step_info* info) {
  return guard([&] {
    require(env != nullptr && params_json != nullptr && info != nullptr, "null argument");
    const EpisodeParams params = episode_params_from_json(parse_json_line(params_json));
    fill(env->session.reset(params), obs, obs_capacity, info);
  });
}

hxc_status hxc_env_step(hxc_env* env, int action, float* obs, size_t obs_capacity,
                        hxc_step_info* info) {
  return guard([&] {
    require(env != nullptr && info != nullptr, "null argument");
    fill(env->session.step(action), obs, obs_capacity, info);
  });
}

hxc_status hxc_env_replay(const hxc_env* env, char** replay_json) {
  return guard([&] {
    require(env != nullptr && replay_json != nullptr, "null argument");
    *replay_json = duplicate(Json(env->session.record_replay()).dump());
  });
}

void hxc_env_destroy(hxc_env* env) { delete env; }

hxc_status hxc_eval_run(const char* config_json, char** report_json, char** csv_out) {
  return guard([&] {
    require(config_json != nullptr && report_json != nullptr, "null argument");
    const Json j = parse_json_line(config_json);
    require(j.is_object(), "config must be a JSON object");
    EvalConfig c;
    c.blue = j.value("blue", c.blue);
    c.red = j.value("red", c.red);
    const Json sizes = j.value("sizes", Json("3..12"));
    if (sizes.is_string()) {
      c.sizes = parse_sizes(sizes.get<std::string>());
    } else {
      for (const Json& s : sizes) c.sizes.push_back(parse_sizes(std::to_string(s.get<int>())).front());
    }
    c.games = j.value("games", c.games);
    c.base_seed = j.value("seed", c.base_seed);
    c.workers = j.value("workers", c.workers);
    c.allow_failures = j.value("allow_failures", c.allow_failures);
    if (auto dir = opt_string(j, "replay_dir")) c.replay_dir = *dir;
    if (j.contains("baseline")) c.baseline_blue = opt_string(j, "baseline");
    if (c.baseline_blue && *c.baseline_blue == "none") c.baseline_blue.reset();
    if (j.contains("external_timeout_ms")) {
      c.external_timeout = std::chrono::milliseconds(j["external_timeout_ms"].get<long>());
    }
    const EvalReport report = run_eval(c);
    std::string text = report_to_json(report).dump(2);
    std::string csv = csv_out != nullptr ? report_to_csv(report) : std::string();
    *report_json = duplicate(text);
    if (csv_out != nullptr) *csv_out = duplicate(csv);
  });
}

hxc_status hxc_replay_verify(const char* replay_json, char** message_out) {
  return guard([&] {
    require(replay_json != nullptr, "replay_json is null");
    const ReplayDocument doc = parse_json_line(replay_json).get<ReplayDocument>();
    const ReplayCheck check = verify_replay(doc);
    if (message_out != nullptr) *message_out = duplicate(check.ok ? "ok" : check.message);
    if (!check.ok) throw Error(ErrorCode::verification, check.message);
  });
}

hxc_status hxc_server_start(const char* config_json, hxc_server** out) {
  return guard([&] {
    require(out != nullptr, "out is null");
    ServerConfig c;
    if (config_json != nullptr) {
      const Json j = parse_json_line(config_json);
      require(j.is_object(), "config must be a JSON object");
      c.host = j.value("host", c.host);
      c.port = j.value("port", c.port);
      c.http_port = j.value("http_port", c.http_port);
      if (auto dir = opt_string(j, "replay_dir")) c.replay_dir = *dir;
      if (auto dir = opt_string(j, "static_dir")) c.static_dir = *dir;
    }
    auto s = std::make_unique<hxc_server>();
    s->server = std::make_unique<Server>(with_env_overrides(c));
    s->server->start();
    *out = s.release();
  });
}

int hxc_server_port(const hxc_server* s) { return s != nullptr ? s->server->port() : -1; }

int hxc_server_http_port(const hxc_server* s) { return s != nullptr ? s->server->http_port() : -1; }

hxc_status hxc_server_wait(hxc_server* s) {
  return guard([&] {
    require(s != nullptr, "server is null");
    s->server->wait();
  });
}

hxc_status hxc_server_stop(hxc_server* s) {
  return guard([&] {
    require(s != nullptr, "server is null");
    s->server->stop();
  });
}

void hxc_server_destroy(hxc_server* s) { delete s; }

hxc_status hxc_serve_stream(int in_fd, int out_fd, const char* replay_dir) {
  return guard([&] {
    std::optional<ReplayStore> store;
    if (replay_dir != nullptr) store.emplace(replay_dir);
    serve_stream(in_fd, out_fd, store ? &*store : nullptr);
  });
}

}  // extern "C"
