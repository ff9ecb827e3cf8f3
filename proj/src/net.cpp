#include "net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "hexcombat/error.hpp"

namespace hexcombat::net {

void Socket::reset() noexcept {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void Socket::shutdown() noexcept {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

namespace {

std::string errno_text() { return std::strerror(errno); }

addrinfo* resolve(const std::string& host, int port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
  if (rc != 0) {
    throw Error(ErrorCode::io, "cannot resolve " + host + ": " + ::gai_strerror(rc));
  }
  return res;
}

}  // namespace

Socket connect_tcp(const std::string& host, int port) {
  addrinfo* res = resolve(host, port, false);
  Socket s;
  for (addrinfo* p = res; p != nullptr; p = p->ai_next) {
    Socket candidate(::socket(p->ai_family, p->ai_socktype, p->ai_protocol));
    if (!candidate.valid()) continue;
    if (::connect(candidate.fd(), p->ai_addr, p->ai_addrlen) == 0) {
      s = std::move(candidate);
      break;
    }
  }
  ::freeaddrinfo(res);
  if (!s.valid()) {
    throw Error(ErrorCode::io, "cannot connect to " + host + ":" + std::to_string(port) + ": " +
                                   errno_text());
  }
  int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return s;
}

Socket listen_tcp(const std::string& host, int port) {
  addrinfo* res = resolve(host, port, true);
  Socket s(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
  if (!s.valid()) {
    ::freeaddrinfo(res);
    throw Error(ErrorCode::io, "socket: " + errno_text());
  }
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const int rc = ::bind(s.fd(), res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) {
    throw Error(ErrorCode::io, "cannot bind port " + std::to_string(port) + ": " + errno_text());
  }
  if (::listen(s.fd(), 64) != 0) throw Error(ErrorCode::io, "listen: " + errno_text());
  return s;
}

Socket accept_connection(const Socket& listener) {
  for (;;) {
    const int fd = ::accept(listener.fd(), nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return Socket(fd);
    }
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return Socket();
  }
}

int bound_port(const Socket& s) {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  if (::getsockname(s.fd(), reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    throw Error(ErrorCode::io, "getsockname: " + errno_text());
  }
  return ntohs(addr.sin_port);
}

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::io, "send: " + errno_text());
    }
    off += static_cast<std::size_t>(n);
  }
}

std::optional<std::string> read_line(int fd, std::string& buffer, std::chrono::milliseconds timeout,
                                     std::size_t max_line) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  for (;;) {
    const auto nl = buffer.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (buffer.size() > max_line) {
      buffer.clear();
      throw Error(ErrorCode::protocol, "line exceeds maximum length");
    }
    int wait_ms = -1;
    if (timeout.count() >= 0) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw Error(ErrorCode::timeout, "timed out waiting for reply");
      wait_ms = static_cast<int>(left.count());
    }
    pollfd pfd{fd, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::io, "poll: " + errno_text());
    }
    if (rc == 0) throw Error(ErrorCode::timeout, "timed out waiting for reply");
    char chunk[4096];
    const ssize_t n = ::read(fd, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::io, "read: " + errno_text());
    }
    if (n == 0) {
      if (buffer.empty()) return std::nullopt;
      std::string line = std::move(buffer);
      buffer.clear();
      return line;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace hexcombat::net
