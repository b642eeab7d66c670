#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <utility>

#include "tracekit/errors.hpp"
#include "tracekit/text.hpp"

namespace tracekit {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string to_string() const {
    return host + ":" + std::to_string(port);
  }
};

/// Parses "host:port". The host part may be empty ("":port binds all
/// interfaces is not supported; use 0.0.0.0 explicitly).
inline Endpoint parse_endpoint(std::string_view text) {
  const std::size_t colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw InvalidArgumentError("endpoint must be host:port, got '" +
                               std::string(text) + "'");
  }
  Endpoint ep;
  ep.host = std::string(text.substr(0, colon));
  std::int64_t port = 0;
  try {
    port = parse_int(text.substr(colon + 1), "port");
  } catch (const ParseError& e) {
    throw InvalidArgumentError(e.what());
  }
  if (port < 0 || port > 65535) {
    throw InvalidArgumentError("port out of range: " + std::to_string(port));
  }
  ep.port = static_cast<std::uint16_t>(port);
  return ep;
}

namespace net_detail {

class AddrInfo {
 public:
  AddrInfo(const std::string& host, std::uint16_t port, bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    if (passive) hints.ai_flags = AI_PASSIVE;
    const std::string service = std::to_string(port);
    const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &info_);
    if (rc != 0) {
      throw NetworkError("cannot resolve " + host + ": " +
                         ::gai_strerror(rc));
    }
  }
  ~AddrInfo() {
    if (info_) ::freeaddrinfo(info_);
  }
  AddrInfo(const AddrInfo&) = delete;
  AddrInfo& operator=(const AddrInfo&) = delete;

  const addrinfo* get() const { return info_; }

 private:
  addrinfo* info_ = nullptr;
};

/// Connects to host:port; returns the connected fd. Throws NetworkError.
inline int connect_tcp(const Endpoint& ep) {
  AddrInfo ai(ep.host, ep.port, /*passive=*/false);
  int last_errno = 0;
  for (const addrinfo* a = ai.get(); a; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) {
      last_errno = errno;
      continue;
    }
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      return fd;
    }
    last_errno = errno;
    ::close(fd);
  }
  throw NetworkError("cannot connect to " + ep.to_string() + ": " +
                     std::strerror(last_errno));
}

/// Binds and listens on host:port (port 0 picks an ephemeral one); returns
/// {fd, bound port}. Throws NetworkError.
inline std::pair<int, std::uint16_t> listen_tcp(const Endpoint& ep,
                                                int backlog = 8) {
  AddrInfo ai(ep.host, ep.port, /*passive=*/true);
  int last_errno = 0;
  for (const addrinfo* a = ai.get(); a; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) {
      last_errno = errno;
      continue;
    }
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 &&
        ::listen(fd, backlog) == 0) {
      sockaddr_in bound{};
      socklen_t len = sizeof(bound);
      if (::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len) != 0) {
        last_errno = errno;
        ::close(fd);
        continue;
      }
      return {fd, ntohs(bound.sin_port)};
    }
    last_errno = errno;
    ::close(fd);
  }
  throw NetworkError("cannot bind " + ep.to_string() + ": " +
                     std::strerror(last_errno));
}

/// Writes the whole buffer; false once the peer is gone.
inline bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace net_detail
}  // namespace tracekit
