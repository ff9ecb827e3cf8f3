#include "hexcombat/server.hpp"

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <list>
#include <sstream>
#include <thread>

#include "hexcombat/protocol.hpp"
#include "net.hpp"

namespace hexcombat {

namespace {

constexpr const char* kJson = "application/json";

std::string dump(const Json& j) { return j.dump(-1, ' ', false, Json::error_handler_t::replace); }

int http_status(const Error& e) {
  if (dynamic_cast<const UnknownSession*>(&e) != nullptr) return 404;
  switch (e.code()) {
    case ErrorCode::invalid_argument:
    case ErrorCode::protocol: return 400;
    case ErrorCode::illegal_action:
    case ErrorCode::invalid_state: return 409;
    default: return 500;
  }
}

void send_error(httplib::Response& res, int status, ErrorCode code, std::string_view message) {
  res.status = status;
  res.set_content(dump(error_reply(code, message)), kJson);
}

/// Runs `body` and turns any exception into a structured error response.
template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    send_error(res, http_status(e), e.code(), e.what());
  } catch (const Json::exception& e) {
    send_error(res, 400, ErrorCode::protocol, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, ErrorCode::internal, e.what());
  }
}

std::optional<int> env_int(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < -1 || n > 65535) {
    throw Error(ErrorCode::invalid_argument, std::string("bad value for ") + name);
  }
  return static_cast<int>(n);
}

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void serve_connection(int fd, const ReplayStore* store) {
  try {
    serve_stream(fd, fd, store);
  } catch (const std::exception&) {
    // Peer went away; nothing left to report to.
  }
}

}  // namespace

// ---------------------------------------------------------------- UI hub

struct UiHub::Session {
  Session(std::string id_, UiSessionParams p, ScenarioSpec spec)
      : id(std::move(id_)),
        params(std::move(p)),
        match(std::move(spec), params.human, params.opponent,
              mix_seed(params.seed, params.human == Faction::blue ? 2 : 1)) {}

  std::string id;
  UiSessionParams params;
  mutable std::mutex mutex;
  mutable std::condition_variable changed;
  Match match;
  long version = 0;
  std::optional<std::string> replay_id;
};

UiSessionParams ui_params_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::protocol, "session parameters must be an object");
  UiSessionParams p;
  if (j.contains("scenario")) {
    p.scenario = j.at("scenario").get<ScenarioSpec>();
  } else {
    p.size = j.value("size", 5);
  }
  p.seed = j.value("seed", std::uint64_t{0});
  p.human = parse_faction(j.value("human", std::string("blue")));
  p.opponent = j.value("opponent", std::string("passagg"));
  validate_agent_spec(p.opponent);
  return p;
}

Json board_layout_json() {
  return Json{{"offset", "odd-r"},
              {"row_pitch", kRowPitch},
              {"odd_row_shift", 0.5},
              {"hex_pitch", 1.0},
              {"row_zero", "top"},
              {"directions", {"E", "NE", "NW", "W", "SW", "SE"}},
              {"pass_action", kPassAction}};
}

Json UiHub::create(const UiSessionParams& params) {
  ScenarioSpec spec;
  if (params.scenario) {
    spec = *params.scenario;
  } else if (params.size) {
    spec = generate(*params.size, params.seed);
  } else {
    throw Error(ErrorCode::invalid_argument, "a size or a scenario is required");
  }
  std::string id;
  {
    std::lock_guard lock(mutex_);
    if (stopping_) throw Error(ErrorCode::invalid_state, "server is shutting down");
    id = "s" + std::to_string(next_id_++);
  }
  auto session = std::make_shared<Session>(id, params, std::move(spec));
  Json view;
  {
    std::lock_guard lock(session->mutex);
    if (session->match.terminal() && store_ != nullptr) {
      session->replay_id = store_->put(session->match.replay());
    }
    view = view_locked(*session);
  }
  std::lock_guard lock(mutex_);
  sessions_.emplace(id, std::move(session));
  return view;
}

Json UiHub::list() const {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [id, s] : sessions_) all.push_back(s);
  }
  Json out = Json::array();
  for (const auto& s : all) {
    std::lock_guard lock(s->mutex);
    out.push_back({{"session", s->id},
                   {"human", to_string(s->params.human)},
                   {"opponent", s->params.opponent},
                   {"size", s->match.state().dims().rows},
                   {"phase", s->match.state().phase()},
                   {"version", s->version},
                   {"terminal", s->match.terminal()}});
  }
  return out;
}

std::shared_ptr<UiHub::Session> UiHub::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw UnknownSession(id);
  return it->second;
}

Json UiHub::view_locked(const Session& s) {
  const GameState& state = s.match.state();
  const auto unit = s.match.controlled_unit();
  LegalMask mask{};
  Json targets = Json::array();
  if (unit) {
    mask = legal_mask(state, *unit);
    const HexCoord from = state.find_unit(*unit)->position;
    for (Direction d : kAllDirections) {
      const auto k = static_cast<std::size_t>(d);
      if (!mask[k]) continue;
      const HexCoord to = step(from, d);
      const Unit* occupant = state.unit_at(to);
      targets.push_back({{"action", static_cast<int>(k)},
                         {"row", to.row},
                         {"col", to.col},
                         {"kind", occupant != nullptr ? "attack" : "move"}});
    }
  }
  return Json{{"session", s.id},
              {"version", s.version},
              {"human", to_string(s.params.human)},
              {"opponent", s.params.opponent},
              {"state", state_to_json(state)},
              {"controlled_unit", unit ? Json(*unit) : Json(nullptr)},
              {"legal_mask", legal_mask_json(mask)},
              {"targets", std::move(targets)},
              {"terminal", s.match.terminal()},
              {"replay_id", s.replay_id ? Json(*s.replay_id) : Json(nullptr)}};
}

Json UiHub::view(const std::string& id) const {
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  return view_locked(*s);
}

Json UiHub::move(const std::string& id, ActionIndex action) {
  const auto s = find(id);
  Json view;
  {
    std::lock_guard lock(s->mutex);
    s->match.act(action);
    if (s->match.terminal() && store_ != nullptr) s->replay_id = store_->put(s->match.replay());
    ++s->version;
    view = view_locked(*s);
  }
  s->changed.notify_all();
  return view;
}

ReplayDocument UiHub::replay(const std::string& id) const {
  const auto s = find(id);
  std::lock_guard lock(s->mutex);
  if (!s->match.terminal()) throw Error(ErrorCode::invalid_state, "game is still in progress");
  return s->match.replay();
}

std::optional<Json> UiHub::wait_update(const std::string& id, long seen,
                                       std::chrono::milliseconds timeout) const {
  const auto s = find(id);
  std::unique_lock lock(s->mutex);
  const bool ready = s->changed.wait_for(lock, timeout, [&] { return s->version > seen || stopping(); });
  if (!ready || stopping()) return std::nullopt;
  return view_locked(*s);
}

void UiHub::shutdown() {
  std::vector<std::shared_ptr<Session>> all;
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
    for (const auto& [id, s] : sessions_) all.push_back(s);
  }
  for (const auto& s : all) {
    std::lock_guard lock(s->mutex);
    s->changed.notify_all();
  }
}

bool UiHub::stopping() const noexcept {
  std::lock_guard lock(mutex_);
  return stopping_;
}

// ---------------------------------------------------------------- server

ServerConfig with_env_overrides(ServerConfig config) {
  if (const char* v = std::getenv("HEXCOMBAT_HOST"); v != nullptr && *v != '\0') config.host = v;
  if (const auto p = env_int("HEXCOMBAT_PORT")) config.port = *p;
  if (const auto p = env_int("HEXCOMBAT_HTTP_PORT")) config.http_port = *p;
  if (const char* v = std::getenv("HEXCOMBAT_REPLAY_DIR"); v != nullptr && *v != '\0') {
    config.replay_dir = v;
  }
  if (const char* v = std::getenv("HEXCOMBAT_STATIC_DIR"); v != nullptr && *v != '\0') {
    config.static_dir = v;
  }
  return config;
}

struct Server::Impl {
  struct Connection {
    net::Socket socket;
    std::thread thread;
    std::atomic<bool> done{false};
  };

  explicit Impl(ServerConfig c) : config(std::move(c)) {
    if (config.replay_dir) store.emplace(*config.replay_dir);
  }

  const ReplayStore* store_ptr() const { return store ? &*store : nullptr; }

  void routes();
  void accept_loop();
  void reap(bool all);

  ServerConfig config;
  std::optional<ReplayStore> store;
  std::unique_ptr<UiHub> hub;
  httplib::Server http;

  net::Socket listener;
  int learner_port = 0;
  int bound_http_port = -1;
  std::thread accept_thread;
  std::thread http_thread;
  std::mutex conn_mutex;
  std::list<Connection> connections;

  std::mutex state_mutex;
  std::condition_variable stopped_cv;
  bool running = false;
  bool stopped = false;
};

void Server::Impl::reap(bool all) {
  std::list<Connection> finished;
  {
    std::lock_guard lock(conn_mutex);
    for (auto it = connections.begin(); it != connections.end();) {
      if (all) it->socket.shutdown();
      if (all || it->done) {
        auto next = std::next(it);
        finished.splice(finished.end(), connections, it);
        it = next;
      } else {
        ++it;
      }
    }
  }
  for (Connection& c : finished) {
    if (c.thread.joinable()) c.thread.join();
  }
}

void Server::Impl::accept_loop() {
  for (;;) {
    net::Socket client = net::accept_connection(listener);
    if (!client.valid()) return;
    {
      std::lock_guard lock(state_mutex);
      if (stopped) return;
    }
    reap(false);
    std::lock_guard lock(conn_mutex);
    Connection& c = connections.emplace_back();
    c.socket = std::move(client);
    c.thread = std::thread([this, &c] {
      serve_connection(c.socket.fd(), store_ptr());
      c.socket.shutdown();  // the peer sees EOF before the socket is reaped
      c.done = true;
    });
  }
}

void Server::Impl::routes() {
  UiHub& h = *hub;
  const ReplayStore* rs = store_ptr();

  http.set_keep_alive_timeout(1);
  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    send_error(res, 500, ErrorCode::internal, "unhandled server error");
  });
  http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) send_error(res, res.status, ErrorCode::invalid_argument, "no such resource");
  });

  http.Get("/api/layout", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(dump(board_layout_json()), kJson);
  });

  http.Post("/api/sessions", [&h](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = req.body.empty() ? Json::object() : parse_json_line(req.body);
      Json state = h.create(ui_params_from_json(body));
      Json out{{"session", state["session"]}, {"layout", board_layout_json()}, {"state", std::move(state)}};
      res.status = 201;
      res.set_content(dump(out), kJson);
    });
  });

  http.Get("/api/sessions", [&h](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { res.set_content(dump(Json{{"sessions", h.list()}}), kJson); });
  });

  http.Get(R"(/api/sessions/([A-Za-z0-9]+))", [&h](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { res.set_content(dump(h.view(req.matches[1])), kJson); });
  });

  http.Post(R"(/api/sessions/([A-Za-z0-9]+)/move)",
            [&h](const httplib::Request& req, httplib::Response& res) {
              guarded(res, [&] {
                const Json body = parse_json_line(req.body);
                if (!body.is_object() || !body.contains("action") || !body["action"].is_number_integer()) {
                  throw Error(ErrorCode::protocol, "body must be {\"action\": <0..6>}");
                }
                res.set_content(dump(h.move(req.matches[1], body["action"].get<int>())), kJson);
              });
            });

  http.Get(R"(/api/sessions/([A-Za-z0-9]+)/replay)",
           [&h](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const ReplayDocument doc = h.replay(req.matches[1]);
               res.set_content(dump(doc), kJson);
             });
           });

  http.Get(R"(/api/sessions/([A-Za-z0-9]+)/events)",
           [&h](const httplib::Request& req, httplib::Response& res) {
             const std::string id = req.matches[1];
             guarded(res, [&] {
               h.view(id);  // 404 before switching to a stream
               res.set_header("Cache-Control", "no-cache");
               auto seen = std::make_shared<long>(-1);
               res.set_chunked_content_provider(
                   "text/event-stream", [&h, id, seen](std::size_t, httplib::DataSink& sink) {
                     const auto update = h.wait_update(id, *seen, std::chrono::seconds(15));
                     if (h.stopping()) {
                       sink.done();
                       return true;
                     }
                     if (!update) {
                       const std::string ping = ": keepalive\n\n";
                       return sink.write(ping.data(), ping.size());
                     }
                     *seen = (*update)["version"].get<long>();
                     const std::string msg = "event: state\ndata: " + dump(*update) + "\n\n";
                     if (!sink.write(msg.data(), msg.size())) return false;
                     if ((*update)["terminal"].get<bool>()) sink.done();
                     return true;
                   });
             });
           });

  http.Get("/api/replays", [rs](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      Json ids = Json::array();
      if (rs != nullptr) ids = rs->list();
      res.set_content(dump(Json{{"replays", ids}}), kJson);
    });
  });

  http.Get(R"(/api/replays/([0-9a-f]{16}))", [rs](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto doc = rs != nullptr ? rs->get(req.matches[1]) : std::nullopt;
      if (!doc) return send_error(res, 404, ErrorCode::invalid_argument, "unknown replay");
      res.set_content(dump(*doc), kJson);
    });
  });

  http.Get(R"(/api/replays/([0-9a-f]{16})/states)",
           [rs](const httplib::Request& req, httplib::Response& res) {
             guarded(res, [&] {
               const auto doc = rs != nullptr ? rs->get(req.matches[1]) : std::nullopt;
               if (!doc) return send_error(res, 404, ErrorCode::invalid_argument, "unknown replay");
               Json states = Json::array();
               for (const GameState& s : replay_states(*doc)) states.push_back(state_to_json(s));
               res.set_content(dump(Json{{"replay_id", std::string(req.matches[1])},
                                         {"layout", board_layout_json()},
                                         {"final_score", doc->final_score},
                                         {"states", std::move(states)}}),
                               kJson);
             });
           });

  http.Get("/replays", [rs](const httplib::Request&, httplib::Response& res) {
    std::ostringstream html;
    html << "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>Replays</title></head>"
            "<body><h1>Replays</h1>\n<ul>\n";
    if (rs != nullptr) {
      for (const std::string& id : rs->list()) {
        const std::string e = html_escape(id);
        html << "<li><a href=\"/api/replays/" << e << "\">" << e << "</a> (<a href=\"/api/replays/"
             << e << "/states\">states</a>)</li>\n";
      }
    }
    html << "</ul></body></html>\n";
    res.set_content(html.str(), "text/html; charset=utf-8");
  });

  if (config.static_dir && !http.set_mount_point("/", config.static_dir->string())) {
    throw Error(ErrorCode::invalid_argument, "static directory does not exist");
  }
}

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  impl_->hub = std::make_unique<UiHub>(impl_->store_ptr());
}

Server::~Server() { stop(); }

void Server::start() {
  Impl& m = *impl_;
  {
    std::lock_guard lock(m.state_mutex);
    if (m.running || m.stopped) throw Error(ErrorCode::invalid_state, "server already started");
  }
  m.listener = net::listen_tcp(m.config.host, m.config.port);
  m.learner_port = net::bound_port(m.listener);
  if (m.config.http_port >= 0) {
    m.routes();
    if (m.config.http_port == 0) {
      m.bound_http_port = m.http.bind_to_any_port(m.config.host);
    } else if (m.http.bind_to_port(m.config.host, m.config.http_port)) {
      m.bound_http_port = m.config.http_port;
    }
    if (m.bound_http_port <= 0) {
      m.listener.reset();
      throw Error(ErrorCode::io, "cannot bind HTTP port " + std::to_string(m.config.http_port));
    }
    m.http_thread = std::thread([&m] { m.http.listen_after_bind(); });
  }
  m.accept_thread = std::thread([&m] { m.accept_loop(); });
  std::lock_guard lock(m.state_mutex);
  m.running = true;
}

int Server::port() const noexcept { return impl_->learner_port; }
int Server::http_port() const noexcept { return impl_->bound_http_port; }
UiHub& Server::hub() noexcept { return *impl_->hub; }

void Server::wait() {
  std::unique_lock lock(impl_->state_mutex);
  impl_->stopped_cv.wait(lock, [&] { return impl_->stopped || !impl_->running; });
}

void Server::stop() {
  Impl& m = *impl_;
  {
    std::lock_guard lock(m.state_mutex);
    if (!m.running || m.stopped) return;
    m.stopped = true;
  }
  m.hub->shutdown();
  if (m.http_thread.joinable()) {
    m.http.stop();
    m.http_thread.join();
  }
  m.listener.shutdown();
  if (m.accept_thread.joinable()) m.accept_thread.join();
  m.listener.reset();
  m.reap(true);
  m.stopped_cv.notify_all();
}

void serve_stream(int in_fd, int out_fd, const ReplayStore* store) {
  ProtocolHandler handler(store);
  std::string buffer;
  while (!handler.closed()) {
    std::optional<std::string> line;
    try {
      line = net::read_line(in_fd, buffer, std::chrono::milliseconds(-1));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::protocol) throw;
      // The stream position is lost after an oversized line, so give up on it.
      net::write_all(out_fd, dump(error_reply(e.code(), e.what())) + "\n");
      return;
    }
    if (!line) return;
    if (line->find_first_not_of(" \t") == std::string::npos) continue;
    net::write_all(out_fd, handler.handle(*line) + "\n");
  }
}

}  // namespace hexcombat
