#pragma once

// Minimal POSIX socket helpers shared by the policy client and the server.

#include <chrono>
#include <optional>
#include <string>

namespace hexcombat::net {

/// Owning file descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket() { reset(); }
  Socket(Socket&& o) noexcept : fd_(o.release()) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = o.release();
    }
    return *this;
  }
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  int release() noexcept {
    const int f = fd_;
    fd_ = -1;
    return f;
  }
  void reset() noexcept;
  /// Wakes any thread blocked on this socket.
  void shutdown() noexcept;

 private:
  int fd_ = -1;
};

Socket connect_tcp(const std::string& host, int port);

/// Binds and listens. port 0 picks a free port; see bound_port.
Socket listen_tcp(const std::string& host, int port);
int bound_port(const Socket& s);

/// Blocks for the next connection. Returns an invalid socket once the
/// listener has been shut down.
Socket accept_connection(const Socket& listener);

void write_all(int fd, const std::string& data);

/// Reads bytes into `buffer` until a full line is available and returns it
/// without the newline. Returns nullopt on orderly EOF. A negative timeout
/// waits forever. Throws Error{timeout} or Error{io}; lines longer than
/// max_line throw Error{protocol}.
std::optional<std::string> read_line(int fd, std::string& buffer,
                                     std::chrono::milliseconds timeout,
                                     std::size_t max_line = 16u << 20);

}  // namespace hexcombat::net
