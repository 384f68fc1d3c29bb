#pragma once

// Session recording, ticking, snapshots and replay.
//
// A session advances on a fixed lattice of ticks: tick k fires at
// k * tick_ms and consumes the events whose timestamps fall in
// [(k - 1) * tick_ms, k * tick_ms). Within that window samples are
// coalesced to the latest one that passed capture gating; trigger and
// camera events take effect immediately in timestamp order.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aav/grid.hpp"
#include "aav/marks.hpp"
#include "aav/model.hpp"
#include "aav/revis.hpp"
#include "aav/triggers.hpp"

namespace aav {

inline constexpr int kFormatVersion = 1;

enum class SessionMode { Grid, Marks };
std::string_view to_string(SessionMode m);

struct FrameOptions {
  std::vector<double> contour_levels{0.25, 0.5, 0.75};
  MeshParams mesh;

  friend bool operator==(const FrameOptions& a, const FrameOptions& b) {
    return a.contour_levels == b.contour_levels && a.mesh.darken_gain == b.mesh.darken_gain &&
           a.mesh.blur_px == b.mesh.blur_px;
  }
};

struct SessionHeader {
  int v = kFormatVersion;
  SessionMode mode = SessionMode::Grid;
  GridConfig grid{640.0, 480.0, 32.0};
  Scene scene;
  Camera camera;
  MarksOptions marks;
  ModelParams params;
  TriggerMode trigger_mode = TriggerMode::AlwaysOn;
  ImplicitParams implicit;
  FrameOptions frame;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const SessionHeader& a, const SessionHeader& b);
};

struct TriggerEvent {
  bool pressed = false;
  friend bool operator==(const TriggerEvent&, const TriggerEvent&) = default;
};

/// Marks the session's final tick time so replays stop where the live
/// session did.
struct EndEvent {
  friend bool operator==(const EndEvent&, const EndEvent&) = default;
};

struct Event {
  std::int64_t timestamp_ms = 0;
  std::variant<AttentionSample, TriggerEvent, Camera, EndEvent> payload;

  std::string_view kind() const;
  friend bool operator==(const Event&, const Event&) = default;
};

Event sample_event(const AttentionSample& s);
Event trigger_event(std::int64_t t_ms, bool pressed);
Event camera_event(std::int64_t t_ms, const Camera& camera);

struct SessionLog {
  SessionHeader header;
  std::vector<Event> events;

  /// Appends; throws Error(State) when the event is older than the last one.
  void record(Event event);

  friend bool operator==(const SessionLog&, const SessionLog&) = default;
};

/// Newline-delimited JSON: header object on line 1, one event per line.
std::string serialize_log(const SessionLog& log);
SessionLog parse_log(std::string_view text);
void write_log(const SessionLog& log, const std::string& path);
SessionLog read_log(const std::string& path);

struct RevisFrame {
  std::int64_t tick = 0;
  std::int64_t t_ms = 0;
  TriggerMode trigger_mode = TriggerMode::AlwaysOn;
  std::vector<double> short_term;  // normalized by cap
  std::vector<double> cumulative;  // normalized by max
  std::vector<Flag> flags;
  // grid mode
  std::vector<ContourRing> contours;
  BorderMarginal marginal_x, marginal_y;
  std::vector<MeshCellFilter> mesh;
  // marks mode
  std::vector<FaceKey> faces;
  std::vector<MarkStyle> styles;
};

struct Snapshot {
  int v = kFormatVersion;
  std::int64_t timestamp_ms = 0;
  std::int64_t tick = 0;
  SessionHeader header;
  std::vector<FaceKey> faces;  // marks mode target keys
  AttentionMap map;
  TriggerState trigger;
  Camera camera;  // camera pose at snapshot time (marks mode)

  friend bool operator==(const Snapshot& a, const Snapshot& b);
};

std::string serialize_snapshot(const Snapshot& s);
Snapshot parse_snapshot(std::string_view text);
void write_snapshot(const Snapshot& s, const std::string& path);
Snapshot read_snapshot(const std::string& path);

/// Live session state: ingests events, fires ticks and emits frames. Every
/// accepted event is appended to the session's own log.
class Session {
 public:
  using FrameSink = std::function<void(const RevisFrame&)>;

  explicit Session(SessionHeader header);

  const SessionHeader& header() const { return log_.header; }
  const SessionLog& log() const { return log_; }
  std::int64_t ticks() const { return ticks_; }
  std::int64_t now_ms() const { return ticks_ * log_.header.params.tick_ms; }
  const TriggerState& trigger() const { return trigger_; }
  const AttentionMap& map() const;
  const AttentionGrid* grid() const { return grid_ ? &*grid_ : nullptr; }
  const MarkAttentionMap* marks() const { return marks_ ? &*marks_ : nullptr; }
  const Camera& camera() const { return camera_; }
  std::size_t dropped_samples() const { return dropped_; }
  bool ended() const { return ended_; }

  void set_frame_sink(FrameSink sink) { sink_ = std::move(sink); }

  /// Fires all ticks due at or before the event's timestamp, then applies it.
  /// Events older than the current tick window are rejected.
  void ingest(const Event& event);

  /// Fires every tick k with k * tick_ms <= t_ms.
  void advance_to(std::int64_t t_ms);

  /// Records an end marker at the current tick time, or at the last event
  /// when that is later.
  void end();

  Snapshot snapshot() const;
  RevisFrame frame() const;

 private:
  void fire_tick();

  SessionLog log_;
  std::optional<AttentionGrid> grid_;
  std::optional<MarkAttentionMap> marks_;
  Camera camera_;
  TriggerState trigger_;
  std::optional<AttentionSample> pending_;
  std::int64_t ticks_ = 0;
  std::size_t dropped_ = 0;
  bool ended_ = false;
  FrameSink sink_;
};

/// Drives a Session from a recorded log, optionally in several steps.
class Replayer {
 public:
  explicit Replayer(const SessionLog& log);

  /// Ingests events strictly before `until_ms` and advances to it. With no
  /// bound, replays everything through the tick holding the last event (or
  /// the end marker).
  void run(std::optional<std::int64_t> until_ms = std::nullopt);

  Session& session() { return session_; }

 private:
  const SessionLog& log_;
  std::size_t next_ = 0;
  Session session_;
};

Snapshot replay(const SessionLog& log, std::optional<std::int64_t> until_ms = std::nullopt,
                const Session::FrameSink& sink = {});

struct StatsReport {
  SessionMode mode = SessionMode::Grid;
  std::int64_t duration_ms = 0;
  std::int64_t ticks = 0;
  std::size_t samples = 0;
  std::size_t dropped_samples = 0;
  double coverage = 0.0;
  double total_attention_s = 0.0;
  struct Target {
    std::string label;
    double cumulative_s = 0.0;
  };
  std::vector<Target> top;
};

StatsReport compute_stats(const SessionLog& log, std::size_t top_k = 5);
std::string format_stats(const StatsReport& report);

// JSON conversions shared by the log, snapshot, protocol and C API layers.
nlohmann::json header_to_json(const SessionHeader& h);
SessionHeader header_from_json(const nlohmann::json& j);
nlohmann::json event_to_json(const Event& e);
Event event_from_json(const nlohmann::json& j);
nlohmann::json sample_to_json(const AttentionSample& s);
AttentionSample sample_from_json(const nlohmann::json& j);
nlohmann::json camera_to_json(const Camera& c);
Camera camera_from_json(const nlohmann::json& j);
nlohmann::json frame_to_json(const RevisFrame& f);
nlohmann::json snapshot_to_json(const Snapshot& s);
Snapshot snapshot_from_json(const nlohmann::json& j);

}  // namespace aav
