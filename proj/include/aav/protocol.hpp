#pragma once

// Streaming protocol, independent of the transport. Messages are JSON text
// objects tagged by "type":
//
//   client -> server: hello, sample, trigger, snapshot_request
//   server -> client: welcome, frame, snapshot, error
//
// The first client message must be a hello. A hello either opens a new
// session (the connection becomes its owner) or, with "observe": <id>,
// attaches read-only to an existing one.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aav/session.hpp"

namespace aav {

/// Outbound half of a connection. Implementations must be thread-safe.
class Peer {
 public:
  virtual ~Peer() = default;
  virtual void send(std::shared_ptr<const std::string> message) = 0;
  virtual void close() = 0;
  /// Messages queued but not yet written.
  virtual std::size_t pending() const = 0;
};

struct HubOptions {
  std::optional<std::int64_t> tick_ms_override;
  std::string log_dir;  // empty: logs are kept in memory only
  std::size_t max_pending = 256;
};

std::string error_message(std::string_view code, std::string_view text);

class LiveSession {
 public:
  LiveSession(std::string id, SessionHeader header, std::size_t max_pending);

  const std::string& id() const { return id_; }
  std::int64_t tick_ms() const;

  void attach(const std::shared_ptr<Peer>& peer);
  std::size_t observer_count();

  /// Clamps the timestamp into the current tick window and ingests.
  void ingest(Event event);
  /// Fires the next tick; frames are broadcast to every attached peer.
  void tick();
  /// Sends the same bytes to every attached peer. Peers whose queue exceeds
  /// the bound are disconnected.
  void broadcast(const std::shared_ptr<const std::string>& message);

  Snapshot snapshot();
  SessionLog log();
  std::string welcome();
  std::int64_t ticks();

  /// Records the end marker; further events are rejected.
  void finish();
  bool finished();

 private:
  void broadcast_locked(const std::shared_ptr<const std::string>& message);

  std::string id_;
  std::size_t max_pending_;
  std::mutex mu_;
  Session session_;
  std::vector<std::weak_ptr<Peer>> peers_;
};

class SessionHub {
 public:
  explicit SessionHub(HubOptions options = {});

  std::shared_ptr<LiveSession> create(SessionHeader header);
  std::shared_ptr<LiveSession> find(const std::string& id);
  /// Ends the session, writes its log when a log directory is configured and
  /// forgets it.
  void close_session(const std::string& id);
  void close_all();
  std::size_t size();

  const HubOptions& options() const { return options_; }

  /// Invoked for every new session; the transport uses it to start ticking.
  std::function<void(const std::shared_ptr<LiveSession>&)> on_created;

 private:
  HubOptions options_;
  std::mutex mu_;
  std::uint64_t next_id_ = 1;
  std::map<std::string, std::shared_ptr<LiveSession>> sessions_;
};

/// Per-connection protocol state machine.
class Connection {
 public:
  enum class State { AwaitHello, Owner, Observer, Closed };

  Connection(SessionHub& hub, std::shared_ptr<Peer> peer);

  void on_message(std::string_view text);
  /// Transport closed; an owner's session ends with it.
  void on_close();

  State state() const { return state_; }
  const std::shared_ptr<LiveSession>& session() const { return session_; }

 private:
  void reject(std::string_view code, std::string_view text, bool close = true);
  void handle_hello(const nlohmann::json& msg);

  SessionHub& hub_;
  std::shared_ptr<Peer> peer_;
  std::shared_ptr<LiveSession> session_;
  State state_ = State::AwaitHello;
};

}  // namespace aav
