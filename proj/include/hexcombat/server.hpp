#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "hexcombat/json_io.hpp"
#include "hexcombat/replay.hpp"
#include "hexcombat/session.hpp"

namespace hexcombat {

/// Raised for session ids the hub does not know.
class UnknownSession : public Error {
 public:
  explicit UnknownSession(const std::string& id)
      : Error(ErrorCode::invalid_argument, "unknown session '" + id + "'") {}
};

struct UiSessionParams {
  std::optional<int> size;
  std::optional<ScenarioSpec> scenario;
  std::uint64_t seed = 0;
  Faction human = Faction::blue;
  std::string opponent = "passagg";
};

UiSessionParams ui_params_from_json(const Json& j);

/// Geometry hints so clients can draw the board without knowing the rules.
Json board_layout_json();

/// Human-vs-agent games for the browser client. Every view carries a
/// version that increases with each applied move.
class UiHub {
 public:
  explicit UiHub(const ReplayStore* store = nullptr) : store_(store) {}

  Json create(const UiSessionParams& params);
  Json list() const;
  Json view(const std::string& id) const;
  Json move(const std::string& id, ActionIndex action);
  /// Replay of a finished session.
  ReplayDocument replay(const std::string& id) const;

  /// Waits until the session's version exceeds `seen`. Returns nullopt on
  /// timeout or after shutdown().
  std::optional<Json> wait_update(const std::string& id, long seen,
                                  std::chrono::milliseconds timeout) const;
  void shutdown();
  bool stopping() const noexcept;

 private:
  struct Session;
  std::shared_ptr<Session> find(const std::string& id) const;
  static Json view_locked(const Session& s);

  const ReplayStore* store_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  long next_id_ = 1;
  bool stopping_ = false;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 7777;       // learner protocol, 0 picks a free port
  int http_port = 7778;  // UI endpoints, 0 picks a free port, -1 disables
  std::optional<std::filesystem::path> replay_dir;
  std::optional<std::filesystem::path> static_dir;
};

/// Applies HEXCOMBAT_HOST, HEXCOMBAT_PORT, HEXCOMBAT_HTTP_PORT,
/// HEXCOMBAT_REPLAY_DIR and HEXCOMBAT_STATIC_DIR when set.
ServerConfig with_env_overrides(ServerConfig config);

/// Learner protocol over TCP (one episode session per connection) plus the
/// HTTP UI service.
class Server {
 public:
  explicit Server(ServerConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds both listeners and starts serving. Throws Error{io} if a port is busy.
  void start();
  int port() const noexcept;
  int http_port() const noexcept;
  void wait();
  void stop();

  UiHub& hub() noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs the learner protocol over a pair of file descriptors until EOF or
/// a close request.
void serve_stream(int in_fd, int out_fd, const ReplayStore* store = nullptr);

}  // namespace hexcombat
