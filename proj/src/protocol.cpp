#include "aav/protocol.hpp"

#include <algorithm>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "aav/error.hpp"

namespace aav {

using nlohmann::json;

std::string error_message(std::string_view code, std::string_view text) {
  return json{{"type", "error"}, {"code", code}, {"text", text}}.dump();
}

LiveSession::LiveSession(std::string id, SessionHeader header, std::size_t max_pending)
    : id_(std::move(id)), max_pending_(max_pending), session_(std::move(header)) {
  session_.set_frame_sink([this](const RevisFrame& f) {
    auto msg = std::make_shared<const std::string>(
        json{{"type", "frame"}, {"tick", f.tick}, {"payload", frame_to_json(f)}}.dump());
    // Runs inside tick(), which already holds mu_.
    broadcast_locked(msg);
  });
}

std::int64_t LiveSession::tick_ms() const { return session_.header().params.tick_ms; }

void LiveSession::attach(const std::shared_ptr<Peer>& peer) {
  std::lock_guard lock(mu_);
  peers_.push_back(peer);
}

std::size_t LiveSession::observer_count() {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(
      std::count_if(peers_.begin(), peers_.end(), [](const auto& w) { return !w.expired(); }));
}

void LiveSession::ingest(Event event) {
  std::lock_guard lock(mu_);
  const std::int64_t lo = session_.now_ms();
  const std::int64_t hi = lo + session_.header().params.tick_ms - 1;
  std::int64_t t = std::clamp(event.timestamp_ms, lo, hi);
  if (!session_.log().events.empty()) t = std::max(t, session_.log().events.back().timestamp_ms);
  event.timestamp_ms = t;
  session_.ingest(event);
}

void LiveSession::tick() {
  std::lock_guard lock(mu_);
  if (session_.ended()) return;
  session_.advance_to(session_.now_ms() + session_.header().params.tick_ms);
}

void LiveSession::broadcast(const std::shared_ptr<const std::string>& message) {
  std::lock_guard lock(mu_);
  broadcast_locked(message);
}

void LiveSession::broadcast_locked(const std::shared_ptr<const std::string>& message) {
  for (auto it = peers_.begin(); it != peers_.end();) {
    auto p = it->lock();
    if (!p) {
      it = peers_.erase(it);
    } else if (p->pending() >= max_pending_) {
      p->close();
      it = peers_.erase(it);
    } else {
      p->send(message);
      ++it;
    }
  }
}

Snapshot LiveSession::snapshot() {
  std::lock_guard lock(mu_);
  return session_.snapshot();
}

SessionLog LiveSession::log() {
  std::lock_guard lock(mu_);
  return session_.log();
}

std::string LiveSession::welcome() {
  std::lock_guard lock(mu_);
  return json{{"type", "welcome"}, {"session_id", id_}, {"config", header_to_json(session_.header())}}.dump();
}

std::int64_t LiveSession::ticks() {
  std::lock_guard lock(mu_);
  return session_.ticks();
}

void LiveSession::finish() {
  std::lock_guard lock(mu_);
  if (!session_.ended()) session_.end();
}

bool LiveSession::finished() {
  std::lock_guard lock(mu_);
  return session_.ended();
}

SessionHub::SessionHub(HubOptions options) : options_(std::move(options)) {}

std::shared_ptr<LiveSession> SessionHub::create(SessionHeader header) {
  if (options_.tick_ms_override) header.params.tick_ms = *options_.tick_ms_override;
  std::shared_ptr<LiveSession> s;
  {
    std::lock_guard lock(mu_);
    const std::string id = "s" + std::to_string(next_id_++);
    s = std::make_shared<LiveSession>(id, std::move(header), options_.max_pending);
    sessions_.emplace(id, s);
  }
  if (on_created) on_created(s);
  return s;
}

std::shared_ptr<LiveSession> SessionHub::find(const std::string& id) {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

void SessionHub::close_session(const std::string& id) {
  std::shared_ptr<LiveSession> s;
  {
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) return;
    s = it->second;
    sessions_.erase(it);
  }
  s->finish();
  if (!options_.log_dir.empty()) {
    std::filesystem::create_directories(options_.log_dir);
    write_log(s->log(), (std::filesystem::path(options_.log_dir) / (id + ".aav.jsonl")).string());
  }
}

void SessionHub::close_all() {
  std::vector<std::string> ids;
  {
    std::lock_guard lock(mu_);
    for (const auto& [id, s] : sessions_) ids.push_back(id);
  }
  for (const auto& id : ids) close_session(id);
}

std::size_t SessionHub::size() {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

Connection::Connection(SessionHub& hub, std::shared_ptr<Peer> peer) : hub_(hub), peer_(std::move(peer)) {}

void Connection::reject(std::string_view code, std::string_view text, bool close) {
  peer_->send(std::make_shared<const std::string>(error_message(code, text)));
  if (!close) return;
  peer_->close();
  on_close();
}

void Connection::handle_hello(const json& msg) {
  if (const auto it = msg.find("observe"); it != msg.end()) {
    auto s = hub_.find(it->get<std::string>());
    if (!s) return reject("unknown_session", "no live session '" + it->get<std::string>() + "'");
    session_ = std::move(s);
    state_ = State::Observer;
  } else {
    json header = msg;
    header["kind"] = "header";
    header["v"] = msg.value("v", kFormatVersion);
    session_ = hub_.create(header_from_json(header));
    state_ = State::Owner;
  }
  peer_->send(std::make_shared<const std::string>(session_->welcome()));
  session_->attach(peer_);
}

void Connection::on_message(std::string_view text) {
  if (state_ == State::Closed) return;
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::exception& e) {
    return reject("malformed", e.what());
  }
  if (!msg.is_object() || !msg.contains("type") || !msg.at("type").is_string())
    return reject("malformed", "message must be an object with a string \"type\"");
  const std::string type = msg.at("type").get<std::string>();

  try {
    if (state_ == State::AwaitHello) {
      if (type != "hello") return reject("handshake", "first message must be hello, got '" + type + "'");
      return handle_hello(msg);
    }
    if (type == "hello") return reject("handshake", "duplicate hello", false);
    if (type == "snapshot_request") {
      peer_->send(std::make_shared<const std::string>(
          json{{"type", "snapshot"}, {"snapshot", snapshot_to_json(session_->snapshot())}}.dump()));
      return;
    }
    if (type == "sample" || type == "trigger") {
      if (state_ != State::Owner) return reject("read_only", "observers cannot send " + type, false);
      if (type == "sample") {
        json body = msg.contains("sample") ? msg.at("sample") : msg;
        session_->ingest(sample_event(sample_from_json(body)));
      } else {
        session_->ingest(trigger_event(msg.value("t", std::int64_t{0}), msg.at("pressed").get<bool>()));
      }
      return;
    }
    reject("malformed", "unknown message type '" + type + "'");
  } catch (const Error& e) {
    // A failed hello leaves nothing to keep the connection open for.
    reject("invalid", e.what(), state_ == State::AwaitHello);
  } catch (const json::exception& e) {
    reject("malformed", e.what());
  }
}

void Connection::on_close() {
  if (state_ == State::Closed) return;
  if (state_ == State::Owner && session_) hub_.close_session(session_->id());
  state_ = State::Closed;
}

}  // namespace aav
