#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "aav/protocol.hpp"

namespace aav {

struct ServerOptions {
  std::string address = "0.0.0.0";
  unsigned short port = 8080;  // 0 picks a free port
  std::optional<std::int64_t> tick_ms;
  std::string log_dir;
  int threads = 2;
  std::size_t max_pending = 256;
  bool handle_signals = false;  // stop on SIGINT/SIGTERM
};

/// Applies AAV_PORT and AAV_TICK_MS from the environment on top of `base`.
ServerOptions server_options_from_env(ServerOptions base = {});

/// WebSocket endpoint at /session (one session per connection, observers
/// attach by id) and a plain-text health check at /healthz.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the worker threads; returns the bound port. Throws
  /// Error(Io) when the address cannot be bound.
  unsigned short start();
  /// Blocks until stop() is called or a handled signal arrives.
  void wait();
  /// Closes live sessions (writing their logs) and joins the workers.
  void stop();

  SessionHub& hub();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace aav
