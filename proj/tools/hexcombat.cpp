// Command-line front end. Talks to the library only through the C API.

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "hexcombat/hexcombat.h"

namespace {

using Json = nlohmann::json;

int report(hxc_status status) {
  std::cerr << "error (" << hxc_status_name(status) << "): " << hxc_last_error() << '\n';
  return 1;
}

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  hxc_string_free(s);
  return out;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hex-grid combat simulation, evaluation and environment server"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hxc_version()));

  auto* eval = app.add_subcommand("eval", "play agent matchups and report score statistics");
  std::string blue = "passagg", red = "passagg", sizes = "3..12", out_path, csv_path, replay_dir;
  std::string normalize_to = "random";
  int games = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 0;
  bool allow_failures = false;
  long external_timeout_ms = 30000;
  eval->add_option("--blue", blue, "blue agent: passagg, random or external:HOST:PORT[:local|global]");
  eval->add_option("--red", red, "red agent");
  eval->add_option("--sizes", sizes, "board sizes, e.g. 3..12, 5 or 3,5,7");
  eval->add_option("--games", games, "games per board size")->check(CLI::PositiveNumber);
  eval->add_option("--seed", seed, "base seed; game i uses seed + i");
  eval->add_option("--out", out_path, "JSON report path (stdout if omitted)");
  eval->add_option("--csv", csv_path, "also write a CSV summary");
  eval->add_option("--replay-dir", replay_dir, "store a replay for every game");
  eval->add_option("--normalize-to", normalize_to, "baseline blue agent for normalization, or none");
  eval->add_option("--workers", workers, "worker threads (0: all cores)");
  eval->add_option("--external-timeout-ms", external_timeout_ms, "reply timeout for external agents");
  eval->add_flag("--allow-failures", allow_failures, "report failed games instead of aborting");

  auto* serve = app.add_subcommand("serve", "host the learner protocol and the UI service");
  std::string host = "127.0.0.1", static_dir;
  int port = 7777, http_port = 7778;
  bool stdio = false;
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "learner protocol TCP port (0: any free port)");
  serve->add_option("--http-port", http_port, "UI HTTP port (0: any free port, -1: off)");
  serve->add_option("--replay-dir", replay_dir, "directory for finished-game replays");
  serve->add_option("--static-dir", static_dir, "directory served at / (browser client)");
  serve->add_flag("--stdio", stdio, "speak the learner protocol on stdin/stdout instead");

  auto* verify = app.add_subcommand("replay-verify", "re-simulate a replay file and check its scores");
  std::string replay_file;
  verify->add_option("file", replay_file, "replay JSON file")->required()->check(CLI::ExistingFile);

  auto* scenario = app.add_subcommand("scenario", "print a generated scenario as JSON");
  int size = 5;
  scenario->add_option("--size", size, "board size 3..12");
  scenario->add_option("--seed", seed, "scenario seed");

  CLI11_PARSE(app, argc, argv);

  if (*eval) {
    Json config{{"blue", blue},       {"red", red},         {"sizes", sizes},
                {"games", games},     {"seed", seed},       {"workers", workers},
                {"allow_failures", allow_failures},         {"external_timeout_ms", external_timeout_ms}};
    config["baseline"] = normalize_to == "none" ? Json(nullptr) : Json(normalize_to);
    if (!replay_dir.empty()) config["replay_dir"] = replay_dir;
    char* json_text = nullptr;
    char* csv_text = nullptr;
    const hxc_status st = hxc_eval_run(config.dump().c_str(), &json_text, csv_path.empty() ? nullptr : &csv_text);
    if (st != HXC_OK) return report(st);
    const std::string text = take(json_text) + "\n";
    const std::string csv = take(csv_text);
    if (out_path.empty()) {
      std::cout << text;
    } else if (!write_file(out_path, text)) {
      std::cerr << "cannot write " << out_path << '\n';
      return 1;
    }
    if (!csv_path.empty() && !write_file(csv_path, csv)) {
      std::cerr << "cannot write " << csv_path << '\n';
      return 1;
    }
    return 0;
  }

  if (*serve) {
    std::signal(SIGPIPE, SIG_IGN);
    if (stdio) {
      const hxc_status st = hxc_serve_stream(0, 1, replay_dir.empty() ? nullptr : replay_dir.c_str());
      return st == HXC_OK ? 0 : report(st);
    }
    Json config{{"host", host}, {"port", port}, {"http_port", http_port}};
    if (!replay_dir.empty()) config["replay_dir"] = replay_dir;
    if (!static_dir.empty()) config["static_dir"] = static_dir;

    // Block termination signals before any server thread exists so only
    // sigwait below sees them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    hxc_server* server = nullptr;
    const hxc_status st = hxc_server_start(config.dump().c_str(), &server);
    if (st != HXC_OK) return report(st);
    std::cerr << "learner protocol on " << host << ':' << hxc_server_port(server);
    if (hxc_server_http_port(server) > 0) std::cerr << ", UI on http://" << host << ':' << hxc_server_http_port(server);
    std::cerr << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    hxc_server_stop(server);
    hxc_server_destroy(server);
    return 0;
  }

  if (*verify) {
    std::ifstream in(replay_file, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    char* message = nullptr;
    const hxc_status st = hxc_replay_verify(buf.str().c_str(), &message);
    if (st == HXC_OK) {
      std::cout << "ok\n";
      take(message);
      return 0;
    }
    if (st == HXC_VERIFICATION) {
      std::cout << "FAILED: " << take(message) << '\n';
      return 2;
    }
    return report(st);
  }

  if (*scenario) {
    char* text = nullptr;
    const hxc_status st = hxc_scenario_generate(size, seed, &text);
    if (st != HXC_OK) return report(st);
    std::cout << take(text) << '\n';
    return 0;
  }
  return 0;
}
