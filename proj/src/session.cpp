#include "aav/session.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aav/error.hpp"

namespace aav {

using nlohmann::json;

void SessionHeader::validate() const {
  if (v != kFormatVersion) fail(ErrorCode::InvalidArgument, "unsupported format version");
  params.validate();
  if (trigger_mode == TriggerMode::Implicit) implicit.validate();
  for (double level : frame.contour_levels)
    if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::InvalidArgument, "contour levels must lie in (0, 1)");
  if (!std::is_sorted(frame.contour_levels.begin(), frame.contour_levels.end()))
    fail(ErrorCode::InvalidArgument, "contour levels must be sorted");
  if (mode == SessionMode::Grid) {
    grid.validate();
  } else {
    validate_scene(scene);
    camera.validate();
    if (marks.pick.width <= 0 || marks.pick.height <= 0)
      fail(ErrorCode::InvalidArgument, "pick buffer size must be positive");
    if (!(marks.center_radius_fraction >= 0.0))
      fail(ErrorCode::InvalidArgument, "center radius fraction must be non-negative");
  }
}

bool operator==(const SessionHeader& a, const SessionHeader& b) {
  return a.v == b.v && a.mode == b.mode && a.grid == b.grid && a.scene == b.scene && a.camera == b.camera &&
         a.marks.pick.width == b.marks.pick.width && a.marks.pick.height == b.marks.pick.height &&
         a.marks.center_radius_fraction == b.marks.center_radius_fraction && a.params == b.params &&
         a.trigger_mode == b.trigger_mode && a.implicit == b.implicit && a.frame == b.frame && a.seed == b.seed;
}

bool operator==(const Snapshot& a, const Snapshot& b) {
  return a.v == b.v && a.timestamp_ms == b.timestamp_ms && a.tick == b.tick && a.header == b.header &&
         a.faces == b.faces && a.map == b.map && a.trigger == b.trigger && a.camera == b.camera;
}

std::string_view Event::kind() const {
  switch (payload.index()) {
    case 0: return "sample";
    case 1: return "trigger";
    case 2: return "camera";
    default: return "end";
  }
}

Event sample_event(const AttentionSample& s) { return {s.timestamp_ms, s}; }
Event trigger_event(std::int64_t t_ms, bool pressed) { return {t_ms, TriggerEvent{pressed}}; }
Event camera_event(std::int64_t t_ms, const Camera& camera) { return {t_ms, camera}; }

void SessionLog::record(Event event) {
  if (!events.empty() && event.timestamp_ms < events.back().timestamp_ms)
    fail(ErrorCode::State, "event at " + std::to_string(event.timestamp_ms) + " ms precedes last event at " +
                               std::to_string(events.back().timestamp_ms) + " ms");
  if (event.timestamp_ms < 0) fail(ErrorCode::InvalidArgument, "event timestamps must be non-negative");
  if (auto* s = std::get_if<AttentionSample>(&event.payload)) s->timestamp_ms = event.timestamp_ms;
  events.push_back(std::move(event));
}

std::string serialize_log(const SessionLog& log) {
  std::string out = header_to_json(log.header).dump();
  out += '\n';
  for (const auto& e : log.events) {
    out += event_to_json(e).dump();
    out += '\n';
  }
  return out;
}

SessionLog parse_log(std::string_view text) {
  SessionLog log;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const json j = json::parse(line);
      if (!have_header) {
        if (j.value("kind", "") != "header") fail(ErrorCode::Parse, "first record must be the header");
        log.header = header_from_json(j);
        have_header = true;
      } else {
        log.record(event_from_json(j));
      }
    } catch (const json::exception& e) {
      fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      fail(ErrorCode::Parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) fail(ErrorCode::Parse, "line 1: missing header");
  return log;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << data;
  out.flush();
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

}  // namespace

void write_log(const SessionLog& log, const std::string& path) { write_file(path, serialize_log(log)); }
SessionLog read_log(const std::string& path) { return parse_log(read_file(path)); }

std::string serialize_snapshot(const Snapshot& s) { return snapshot_to_json(s).dump() + "\n"; }

Snapshot parse_snapshot(std::string_view text) {
  try {
    return snapshot_from_json(json::parse(text));
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("snapshot: ") + e.what());
  }
}

void write_snapshot(const Snapshot& s, const std::string& path) { write_file(path, serialize_snapshot(s)); }
Snapshot read_snapshot(const std::string& path) { return parse_snapshot(read_file(path)); }

Session::Session(SessionHeader header) {
  header.validate();
  if (header.mode == SessionMode::Grid) {
    grid_.emplace(header.grid);
  } else {
    marks_.emplace(header.scene);
    camera_ = header.camera;
  }
  trigger_ = TriggerState::initial(header.trigger_mode, map().size());
  log_.header = std::move(header);
}

const AttentionMap& Session::map() const { return grid_ ? grid_->map() : marks_->map(); }

void Session::ingest(const Event& event) {
  if (ended_) fail(ErrorCode::State, "session has ended");
  if (event.timestamp_ms < now_ms())
    fail(ErrorCode::State, "event at " + std::to_string(event.timestamp_ms) + " ms is older than the current tick");
  // Validate before any state changes.
  if (std::holds_alternative<TriggerEvent>(event.payload) && trigger_.mode != TriggerMode::Explicit)
    fail(ErrorCode::State, "trigger events require explicit trigger mode");
  if (std::holds_alternative<Camera>(event.payload)) {
    if (!marks_) fail(ErrorCode::State, "camera events require marks mode");
    std::get<Camera>(event.payload).validate();
  }
  if (const auto* s = std::get_if<AttentionSample>(&event.payload))
    if (s->radius_px && *s->radius_px < 0.0) fail(ErrorCode::InvalidArgument, "sample radius must be non-negative");
  if (!log_.events.empty() && event.timestamp_ms < log_.events.back().timestamp_ms)
    fail(ErrorCode::State, "event out of order");

  advance_to(event.timestamp_ms);
  log_.record(event);

  if (const auto* s = std::get_if<AttentionSample>(&event.payload)) {
    if (gate_capture(trigger_)) {
      pending_ = *s;
      pending_->timestamp_ms = event.timestamp_ms;
    } else {
      ++dropped_;
    }
  } else if (const auto* t = std::get_if<TriggerEvent>(&event.payload)) {
    trigger_ = on_explicit(std::move(trigger_), t->pressed);
  } else if (const auto* c = std::get_if<Camera>(&event.payload)) {
    camera_ = *c;
  } else {
    ended_ = true;
  }
}

void Session::advance_to(std::int64_t t_ms) {
  const std::int64_t tick_ms = log_.header.params.tick_ms;
  while ((ticks_ + 1) * tick_ms <= t_ms) fire_tick();
}

void Session::end() {
  const std::int64_t t = log_.events.empty() ? now_ms() : std::max(now_ms(), log_.events.back().timestamp_ms);
  ingest(Event{t, EndEvent{}});
}

void Session::fire_tick() {
  const ModelParams& params = log_.header.params;
  const AttentionSample* sample = pending_ ? &*pending_ : nullptr;
  if (grid_)
    apply_sample(*grid_, sample, params);
  else
    apply_sample_3d(*marks_, log_.header.scene, camera_, sample, params, log_.header.marks);
  pending_.reset();
  ++ticks_;

  if (trigger_.mode == TriggerMode::Implicit) {
    auto st = map().fused_short_term();
    for (double& v : st) v /= params.cap;
    update_flags(trigger_, st, log_.header.implicit);
  }
  if (sink_ && trigger_.revis_visible) sink_(frame());
}

RevisFrame Session::frame() const {
  const auto& h = log_.header;
  RevisFrame f;
  f.tick = ticks_;
  f.t_ms = now_ms();
  f.trigger_mode = trigger_.mode;
  f.short_term = map().fused_short_term();
  for (double& v : f.short_term) v /= h.params.cap;
  f.cumulative = normalize(map().fused_cumulative());
  f.flags = trigger_.flags;
  if (grid_) {
    Field st{h.grid.rows(), h.grid.cols(), f.short_term};
    f.contours = contours(st, h.grid, h.frame.contour_levels);
    f.marginal_x = border_marginals(st, Axis::X);
    f.marginal_y = border_marginals(st, Axis::Y);
    f.mesh = mesh_filters(f.short_term, h.frame.mesh);
  } else {
    f.faces = marks_->keys();
    StyleOptions opts;
    opts.heatmap = trigger_.mode != TriggerMode::Implicit;
    f.styles = mark_styles(f.short_term, f.cumulative, f.flags, Colormap::sequential(), opts);
  }
  return f;
}

Snapshot Session::snapshot() const {
  Snapshot s;
  s.timestamp_ms = now_ms();
  s.tick = ticks_;
  s.header = log_.header;
  if (marks_) s.faces = marks_->keys();
  s.map = map();
  s.trigger = trigger_;
  if (marks_) s.camera = camera_;
  return s;
}

Replayer::Replayer(const SessionLog& log) : log_(log), session_(log.header) {}

void Replayer::run(std::optional<std::int64_t> until_ms) {
  const auto& events = log_.events;
  while (next_ < events.size() && (!until_ms || events[next_].timestamp_ms < *until_ms)) {
    session_.ingest(events[next_++]);
  }
  if (until_ms) {
    session_.advance_to(*until_ms);
  } else if (!events.empty()) {
    const std::int64_t tick_ms = log_.header.params.tick_ms;
    const Event& last = events.back();
    const std::int64_t last_tick = std::holds_alternative<EndEvent>(last.payload)
                                       ? last.timestamp_ms / tick_ms
                                       : last.timestamp_ms / tick_ms + 1;
    session_.advance_to(last_tick * tick_ms);
  }
}

Snapshot replay(const SessionLog& log, std::optional<std::int64_t> until_ms, const Session::FrameSink& sink) {
  Replayer r(log);
  r.session().set_frame_sink(sink);
  r.run(until_ms);
  return r.session().snapshot();
}

StatsReport compute_stats(const SessionLog& log, std::size_t top_k) {
  Replayer r(log);
  r.run();
  const Session& s = r.session();
  StatsReport rep;
  rep.mode = log.header.mode;
  rep.ticks = s.ticks();
  rep.duration_ms = s.now_ms();
  rep.samples = static_cast<std::size_t>(std::count_if(log.events.begin(), log.events.end(), [](const Event& e) {
    return std::holds_alternative<AttentionSample>(e.payload);
  }));
  rep.dropped_samples = s.dropped_samples();
  const auto cumulative = s.map().fused_cumulative();
  std::size_t touched = 0;
  for (double v : cumulative) {
    rep.total_attention_s += v;
    if (v > 0.0) ++touched;
  }
  rep.coverage = cumulative.empty() ? 0.0 : static_cast<double>(touched) / static_cast<double>(cumulative.size());

  std::vector<std::size_t> order(cumulative.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cumulative[a] > cumulative[b]; });
  for (std::size_t i = 0; i < order.size() && rep.top.size() < top_k; ++i) {
    const std::size_t t = order[i];
    if (cumulative[t] <= 0.0) break;
    std::string label;
    if (const auto* g = s.grid()) {
      const Cell c = g->cell_at(t);
      label = "cell(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
    } else {
      const FaceKey k = s.marks()->keys()[t];
      label = "face(" + std::to_string(k.object_id) + ":" + std::to_string(k.face_id) + ")";
    }
    rep.top.push_back({std::move(label), cumulative[t]});
  }
  return rep;
}

std::string format_stats(const StatsReport& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "mode: " << to_string(r.mode) << '\n';
  os << "duration_ms: " << r.duration_ms << '\n';
  os << "ticks: " << r.ticks << '\n';
  os << "samples: " << r.samples << " (dropped " << r.dropped_samples << ")\n";
  os << "coverage: " << r.coverage * 100.0 << "%\n";
  os.precision(3);
  os << "total_attention_s: " << r.total_attention_s << '\n';
  os << "top_targets:\n";
  for (const auto& t : r.top) os << "  " << t.label << ' ' << t.cumulative_s << '\n';
  return os.str();
}

}  // namespace aav
