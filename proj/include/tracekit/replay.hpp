#pragma once

#include <unistd.h>

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tracekit/errors.hpp"
#include "tracekit/net.hpp"
#include "tracekit/nmea.hpp"
#include "tracekit/trace.hpp"

namespace tracekit {

struct ReplayConfig {
  Endpoint endpoint{"127.0.0.1", 0};  // port 0 picks an ephemeral port
  double rate_hz = 1.0;
  bool loop = false;  // restart from the first fix after the last one

  void validate() const {
    if (!(rate_hz > 0.0)) {
      throw InvalidArgumentError("replay rate must be positive, got " +
                                 format_fixed(rate_hz, 3));
    }
  }
};

/// Serves a trace as a stream of CRLF-terminated GGA sentences over TCP.
/// Every client that connects gets its own replay from the first fix, at
/// the configured rate; sessions are independent and share only the
/// immutable trace. stop() (or destruction) interrupts all sessions.
class ReplayServer {
 public:
  ReplayServer(Trace trace, ReplayConfig config)
      : trace_(std::move(trace)), config_(std::move(config)) {
    config_.validate();
    if (trace_.empty()) {
      throw EmptyInputError("replay trace has no fixes");
    }
  }

  ~ReplayServer() { stop(); }

  ReplayServer(const ReplayServer&) = delete;
  ReplayServer& operator=(const ReplayServer&) = delete;

  /// Binds and starts accepting clients. Throws NetworkError when the
  /// endpoint cannot be bound.
  void start() {
    if (listen_fd_ >= 0) return;
    auto [fd, port] = net_detail::listen_tcp(config_.endpoint);
    listen_fd_ = fd;
    bound_port_ = port;
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  /// Port the server actually listens on (resolves port 0).
  std::uint16_t port() const { return bound_port_; }

  Endpoint endpoint() const { return {config_.endpoint.host, bound_port_}; }

  std::size_t sessions_served() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return sessions_served_;
  }

  /// Stops accepting, interrupts running sessions, joins all threads.
  /// Safe to call more than once.
  void stop() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (stopping_) return;
      stopping_ = true;
    }
    stop_cv_.notify_all();
    if (listen_fd_ >= 0) {
      ::shutdown(listen_fd_, SHUT_RDWR);
      ::close(listen_fd_);
      listen_fd_ = -1;
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> sessions;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      sessions.swap(session_threads_);
    }
    for (std::thread& t : sessions) {
      if (t.joinable()) t.join();
    }
  }

  /// Blocks until stop() is called from another thread (or forever).
  void wait() {
    std::unique_lock<std::mutex> lock(mutex_);
    stop_cv_.wait(lock, [this] { return stopping_; });
  }

 private:
  void accept_loop() {
    for (;;) {
      const int client = ::accept(listen_fd_, nullptr, nullptr);
      if (client < 0) return;  // listener closed by stop()
      std::lock_guard<std::mutex> lock(mutex_);
      if (stopping_) {
        ::close(client);
        return;
      }
      ++sessions_served_;
      session_threads_.emplace_back(
          [this, client] { run_session(client); });
    }
  }

  void run_session(int client_fd) {
    const auto interval = std::chrono::duration<double>(1.0 / config_.rate_hz);
    bool connected = true;
    do {
      for (const GpsFix& fix : trace_.fixes) {
        if (!net_detail::send_all(client_fd, nmea::format_gga(fix) + "\r\n")) {
          connected = false;
          break;
        }
        std::unique_lock<std::mutex> lock(mutex_);
        if (stop_cv_.wait_for(lock, interval,
                              [this] { return stopping_; })) {
          connected = false;
          break;
        }
      }
    } while (connected && config_.loop);
    ::close(client_fd);
  }

  Trace trace_;
  ReplayConfig config_;
  int listen_fd_ = -1;
  std::uint16_t bound_port_ = 0;
  std::thread accept_thread_;
  mutable std::mutex mutex_;
  std::condition_variable stop_cv_;
  std::vector<std::thread> session_threads_;
  std::size_t sessions_served_ = 0;
  bool stopping_ = false;
};

}  // namespace tracekit
