// Exercises the shared library through its C interface only.
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexcombat/hexcombat.h"

extern "C" int hxc_smoke_from_c(void);

using Json = nlohmann::json;

namespace {

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  hxc_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("header compiles as C") { CHECK(hxc_smoke_from_c() == 0); }

TEST_CASE("status names and errors") {
  CHECK(std::string(hxc_status_name(HXC_OK)) == "ok");
  CHECK(std::string(hxc_status_name(HXC_ILLEGAL_ACTION)) == "illegal_action");
  CHECK(std::string(hxc_version()) == "1.0.0");
  double w = 0.0;
  CHECK(hxc_decay_weight(-1.0, &w) == HXC_INVALID_ARGUMENT);
  CHECK(std::string(hxc_last_error()).size() > 0);
  CHECK(hxc_decay_weight(1.0, nullptr) == HXC_INVALID_ARGUMENT);
  CHECK(hxc_decay_weight(4.0, &w) == HXC_OK);
  CHECK(w == doctest::Approx(0.775));
}

TEST_CASE("localize through the C API") {
  const int n = 9;
  std::vector<double> global(static_cast<std::size_t>(HXC_CHANNELS) * n * n, 0.0);
  // Enemy health channel (4), four hexes east of (4,2).
  global[(4 * n + 4) * n + 6] = 1.0;
  std::vector<double> local(HXC_CHANNELS * HXC_LOCAL_SIZE * HXC_LOCAL_SIZE, -1.0);
  REQUIRE(hxc_localize(global.data(), n, n, 4, 2, local.data()) == HXC_OK);
  CHECK(local[(4 * 7 + 3) * 7 + 6] == doctest::Approx(0.775));
  double sum = 0.0;
  for (double v : local) sum += v;
  CHECK(sum == doctest::Approx(0.775));
  CHECK(hxc_localize(global.data(), n, n, 9, 0, local.data()) == HXC_INVALID_ARGUMENT);
  CHECK(hxc_localize(nullptr, n, n, 0, 0, local.data()) == HXC_INVALID_ARGUMENT);
}

TEST_CASE("scenario JSON") {
  char* text = nullptr;
  REQUIRE(hxc_scenario_generate(10, 3, &text) == HXC_OK);
  const Json j = Json::parse(take(text));
  CHECK(j["size"] == 10);
  CHECK(j["phase_budget"] == 40);
  CHECK(j["blue"].size() >= 5);
  CHECK(hxc_scenario_generate(13, 3, &text) == HXC_INVALID_ARGUMENT);
}

TEST_CASE("typed episode") {
  hxc_env* env = nullptr;
  REQUIRE(hxc_env_create(&env) == HXC_OK);
  std::vector<float> obs(HXC_CHANNELS * 7 * 7);
  hxc_step_info info{};
  CHECK(hxc_env_reset(env, R"({"size":5,"seed":2})", obs.data(), 10, &info) == HXC_INVALID_ARGUMENT);
  CHECK(hxc_env_reset(env, R"({"sizes":5})", obs.data(), obs.size(), &info) == HXC_PROTOCOL);
  REQUIRE(hxc_env_reset(env, R"({"size":5,"seed":2})", obs.data(), obs.size(), &info) == HXC_OK);
  CHECK(info.obs_channels == 18);
  CHECK(info.obs_rows == 7);
  CHECK(info.obs_cols == 7);
  CHECK(info.reward == 0.0);
  CHECK(info.legal_mask[HXC_PASS_ACTION] == 1);
  char* replay = nullptr;
  CHECK(hxc_env_replay(env, &replay) == HXC_INVALID_STATE);

  int illegal = -1;
  for (int k = 0; k < HXC_ACTIONS; ++k) {
    if (!info.legal_mask[k]) illegal = k;
  }
  if (illegal >= 0) CHECK(hxc_env_step(env, illegal, obs.data(), obs.size(), &info) == HXC_ILLEGAL_ACTION);

  long deltas = info.raw_score_delta;
  int steps = 0;
  while (!info.terminal && steps < 1000) {
    REQUIRE(hxc_env_step(env, HXC_PASS_ACTION, nullptr, 0, &info) == HXC_OK);
    deltas += info.raw_score_delta;
    ++steps;
  }
  CHECK(info.terminal == 1);
  CHECK(info.unit == -1);
  CHECK(deltas == info.total_score);
  CHECK(hxc_env_step(env, HXC_PASS_ACTION, nullptr, 0, &info) == HXC_INVALID_STATE);

  REQUIRE(hxc_env_replay(env, &replay) == HXC_OK);
  const std::string doc = take(replay);
  char* message = nullptr;
  CHECK(hxc_replay_verify(doc.c_str(), &message) == HXC_OK);
  CHECK(take(message) == "ok");

  Json tampered = Json::parse(doc);
  tampered["final_score"]["blue_city"] = tampered["final_score"]["blue_city"].get<long>() + 24;
  CHECK(hxc_replay_verify(tampered.dump().c_str(), &message) == HXC_VERIFICATION);
  CHECK(take(message).size() > 0);
  CHECK(hxc_replay_verify("{", nullptr) == HXC_PROTOCOL);
  hxc_env_destroy(env);
}

TEST_CASE("protocol handler through the C API") {
  hxc_protocol* p = nullptr;
  REQUIRE(hxc_protocol_create(nullptr, &p) == HXC_OK);
  char* reply = nullptr;
  REQUIRE(hxc_protocol_handle(p, "nonsense", &reply) == HXC_OK);
  CHECK(Json::parse(take(reply))["ok"] == false);
  REQUIRE(hxc_protocol_handle(p, R"({"op":"reset","size":4,"seed":1})", &reply) == HXC_OK);
  CHECK(Json::parse(take(reply))["ok"] == true);
  CHECK(hxc_protocol_closed(p) == 0);
  REQUIRE(hxc_protocol_handle(p, R"({"op":"close"})", &reply) == HXC_OK);
  take(reply);
  CHECK(hxc_protocol_closed(p) == 1);
  hxc_protocol_destroy(p);
}

TEST_CASE("evaluation through the C API") {
  char* report = nullptr;
  char* csv = nullptr;
  REQUIRE(hxc_eval_run(R"({"sizes":[4,5],"games":30,"seed":5,"workers":2})", &report, &csv) == HXC_OK);
  const Json j = Json::parse(take(report));
  CHECK(j["levels"].size() == 2);
  CHECK(j["levels"][1]["size"] == 5);
  CHECK(j["baseline"]["matchup"]["blue"] == "random");
  CHECK(take(csv).rfind("size,games,mean,sem,normalized_mean", 0) == 0);
  REQUIRE(hxc_eval_run(R"({"sizes":"3","games":4,"baseline":null})", &report, nullptr) == HXC_OK);
  CHECK(Json::parse(take(report))["baseline"].is_null());
  CHECK(hxc_eval_run(R"({"sizes":"1..4"})", &report, nullptr) == HXC_INVALID_ARGUMENT);
  CHECK(hxc_eval_run(R"({"blue":"nobody","sizes":"3","games":2})", &report, nullptr) == HXC_INVALID_ARGUMENT);
}

TEST_CASE("server lifecycle through the C API") {
  hxc_server* s = nullptr;
  REQUIRE(hxc_server_start(R"({"port":0,"http_port":-1})", &s) == HXC_OK);
  CHECK(hxc_server_port(s) > 0);
  CHECK(hxc_server_http_port(s) == -1);
  CHECK(hxc_server_stop(s) == HXC_OK);
  CHECK(hxc_server_wait(s) == HXC_OK);
  hxc_server_destroy(s);
  CHECK(hxc_server_start("[]", &s) == HXC_INVALID_ARGUMENT);
}

TEST_CASE("stream serving through the C API") {
  int in[2], out[2];
  REQUIRE(pipe(in) == 0);
  REQUIRE(pipe(out) == 0);
  const std::string req = "{\"op\":\"reset\",\"size\":3,\"seed\":0}\n";
  REQUIRE(write(in[1], req.data(), req.size()) == static_cast<ssize_t>(req.size()));
  close(in[1]);
  CHECK(hxc_serve_stream(in[0], out[1], nullptr) == HXC_OK);
  close(out[1]);
  std::string text;
  char buf[4096];
  ssize_t got;
  while ((got = read(out[0], buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(got));
  close(in[0]);
  close(out[0]);
  REQUIRE(!text.empty());
  CHECK(text.back() == '\n');
  CHECK(Json::parse(text)["ok"] == true);
}
