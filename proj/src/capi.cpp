#include "aav/aav.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "aav/error.hpp"
#include "aav/grid.hpp"
#include "aav/revis.hpp"
#include "aav/server.hpp"
#include "aav/session.hpp"
#include "aav/simulate.hpp"
#include "aav/svg.hpp"

using nlohmann::json;

struct aav_session {
  aav::Session session;
};

struct aav_server {
  std::unique_ptr<aav::Server> server;
};

namespace {

thread_local std::string g_last_error;

aav_status set_error(aav_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
aav_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return AAV_OK;
  } catch (const aav::Error& e) {
    return set_error(static_cast<aav_status>(static_cast<int>(e.code())), e.what());
  } catch (const json::exception& e) {
    return set_error(AAV_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(AAV_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(AAV_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(AAV_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (!p) aav::fail(aav::ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

aav::Source to_source(aav_source s) {
  const int i = static_cast<int>(s);
  if (i < 0 || i >= static_cast<int>(aav::kSourceCount)) aav::fail(aav::ErrorCode::InvalidArgument, "unknown source");
  return static_cast<aav::Source>(i);
}

json parse_json(const char* text, const char* what) {
  require(text, what);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    aav::fail(aav::ErrorCode::Parse, std::string(what) + ": " + e.what());
  }
}

json header_json_with_kind(json j) {
  if (!j.is_object()) aav::fail(aav::ErrorCode::Parse, "header must be a JSON object");
  if (!j.contains("kind")) j["kind"] = "header";
  if (!j.contains("v")) j["v"] = aav::kFormatVersion;
  return j;
}

aav::Session& get(aav_session* s) {
  require(s, "session");
  return s->session;
}

const aav::Session& get(const aav_session* s) {
  require(s, "session");
  return s->session;
}

void push_sample(aav_session* session, int64_t t_ms, std::optional<aav::Point2> pos, aav_source source,
                 double radius_px) {
  aav::AttentionSample sample;
  sample.timestamp_ms = t_ms;
  sample.position = pos;
  sample.source = to_source(source);
  if (radius_px >= 0.0) sample.radius_px = radius_px;
  get(session).ingest(aav::sample_event(sample));
}

std::string replay_summary(const aav::Snapshot& snap) {
  std::ostringstream out;
  const auto cum = snap.map.fused_cumulative();
  double total = 0.0;
  std::size_t attended = 0;
  for (double v : cum) {
    total += v;
    if (v > 0.0) ++attended;
  }
  out << "mode: " << aav::to_string(snap.header.mode) << "\n"
      << "ticks: " << snap.tick << "\n"
      << "time_ms: " << snap.timestamp_ms << "\n"
      << "targets: " << snap.map.size() << "\n"
      << "attended_targets: " << attended << "\n"
      << "total_attention_s: " << total << "\n";
  return out.str();
}

std::string render(const aav::Snapshot& snap, const json& opts) {
  if (snap.header.mode != aav::SessionMode::Grid)
    aav::fail(aav::ErrorCode::InvalidArgument, "rendering requires a grid-mode snapshot");
  const std::string style = opts.value("style", "heatmap");
  const aav::Stat stat = aav::stat_from_string(opts.value("stat", "short_term"));
  aav::SvgOptions svg;
  if (opts.contains("background") && !opts.at("background").is_null())
    svg.background_href = opts.at("background").get<std::string>();
  if (opts.contains("opacity")) svg.opacity = opts.at("opacity").get<double>();

  const auto& config = snap.header.grid;
  aav::Field field = aav::map_field(config, snap.map, stat);
  const aav::Colormap cmap = aav::Colormap::sequential();

  if (style == "heatmap") {
    field.values = aav::normalize(field.values);
    return aav::render_heatmap_svg(config, field, cmap, svg);
  }
  if (style == "contour") {
    field.values = aav::normalize(field.values);
    std::vector<double> levels = snap.header.frame.contour_levels;
    if (opts.contains("levels")) levels = opts.at("levels").get<std::vector<double>>();
    return aav::render_contour_svg(config, aav::contours(field, config, levels), svg);
  }
  if (style == "border") {
    const std::string axis = opts.value("axis", "x");
    if (axis != "x" && axis != "y") aav::fail(aav::ErrorCode::InvalidArgument, "axis must be x or y");
    const auto bstyle = aav::border_style_from_string(opts.value("border_style", "bar"));
    const auto marginal = aav::border_marginals(field, axis == "x" ? aav::Axis::X : aav::Axis::Y, bstyle);
    return aav::render_border_svg(config, marginal, cmap, svg);
  }
  aav::fail(aav::ErrorCode::InvalidArgument, "unknown style '" + style + "'");
}

}  // namespace

extern "C" {

const char* aav_version(void) { return "1.0.0"; }

const char* aav_last_error(void) { return g_last_error.c_str(); }

void aav_string_free(char* s) { std::free(s); }

aav_status aav_session_create(const char* header_json, aav_session** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    const auto header = aav::header_from_json(header_json_with_kind(parse_json(header_json, "header")));
    *out = new aav_session{aav::Session(header)};
  });
}

void aav_session_destroy(aav_session* session) { delete session; }

aav_status aav_session_push_sample(aav_session* session, int64_t t_ms, double x, double y, aav_source source,
                                   double radius_px) {
  return guarded([&] { push_sample(session, t_ms, aav::Point2{x, y}, source, radius_px); });
}

aav_status aav_session_push_center_sample(aav_session* session, int64_t t_ms, aav_source source,
                                          double radius_px) {
  return guarded([&] { push_sample(session, t_ms, std::nullopt, source, radius_px); });
}

aav_status aav_session_push_trigger(aav_session* session, int64_t t_ms, int pressed) {
  return guarded([&] { get(session).ingest(aav::trigger_event(t_ms, pressed != 0)); });
}

aav_status aav_session_push_event_json(aav_session* session, const char* event_json) {
  return guarded([&] { get(session).ingest(aav::event_from_json(parse_json(event_json, "event"))); });
}

aav_status aav_session_advance(aav_session* session, int64_t t_ms) {
  return guarded([&] { get(session).advance_to(t_ms); });
}

aav_status aav_session_end(aav_session* session) {
  return guarded([&] { get(session).end(); });
}

aav_status aav_session_ticks(const aav_session* session, int64_t* out) {
  return guarded([&] {
    require(out, "out");
    *out = get(session).ticks();
  });
}

aav_status aav_session_target_count(const aav_session* session, size_t* out) {
  return guarded([&] {
    require(out, "out");
    *out = get(session).map().size();
  });
}

aav_status aav_session_state(const aav_session* session, size_t target, aav_source source, double* cumulative,
                             double* short_term) {
  return guarded([&] {
    const auto& st = get(session).map().state(to_source(source), target);
    if (cumulative) *cumulative = st.cumulative;
    if (short_term) *short_term = st.short_term;
  });
}

aav_status aav_session_coverage(const aav_session* session, double* out) {
  return guarded([&] {
    require(out, "out");
    const auto& s = get(session);
    if (s.grid()) {
      *out = aav::coverage(*s.grid());
      return;
    }
    const auto cum = s.map().fused_cumulative();
    std::size_t hit = 0;
    for (double v : cum) hit += v > 0.0 ? 1 : 0;
    *out = cum.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(cum.size());
  });
}

aav_status aav_session_snapshot_json(const aav_session* session, char** out) {
  return guarded([&] {
    require(out, "out");
    *out = dup_string(aav::serialize_snapshot(get(session).snapshot()));
  });
}

aav_status aav_session_frame_json(const aav_session* session, char** out) {
  return guarded([&] {
    require(out, "out");
    *out = dup_string(aav::frame_to_json(get(session).frame()).dump());
  });
}

aav_status aav_session_log_jsonl(const aav_session* session, char** out) {
  return guarded([&] {
    require(out, "out");
    *out = dup_string(aav::serialize_log(get(session).log()));
  });
}

aav_status aav_session_write_log(const aav_session* session, const char* path) {
  return guarded([&] {
    require(path, "path");
    aav::write_log(get(session).log(), path);
  });
}

aav_status aav_replay_file(const char* log_path, int has_until, int64_t until_ms, const char* snapshot_path,
                           char** snapshot_out, char** summary_out) {
  return guarded([&] {
    require(log_path, "log_path");
    if (snapshot_out) *snapshot_out = nullptr;
    if (summary_out) *summary_out = nullptr;
    const auto log = aav::read_log(log_path);
    const auto snap = aav::replay(log, has_until ? std::optional<std::int64_t>(until_ms) : std::nullopt);
    if (snapshot_path) aav::write_snapshot(snap, snapshot_path);
    std::unique_ptr<char, decltype(&std::free)> snap_text(
        snapshot_out ? dup_string(aav::serialize_snapshot(snap)) : nullptr, &std::free);
    if (summary_out) *summary_out = dup_string(replay_summary(snap));
    if (snapshot_out) *snapshot_out = snap_text.release();
  });
}

aav_status aav_render_svg(const char* snapshot_path, const char* options_json, char** svg_out) {
  return guarded([&] {
    require(snapshot_path, "snapshot_path");
    require(svg_out, "svg_out");
    *svg_out = nullptr;
    const json opts = options_json ? parse_json(options_json, "options") : json::object();
    if (!opts.is_object()) aav::fail(aav::ErrorCode::InvalidArgument, "render options must be a JSON object");
    *svg_out = dup_string(render(aav::read_snapshot(snapshot_path), opts));
  });
}

aav_status aav_simulate(const char* spec_json, const char* header_json, char** log_out) {
  return guarded([&] {
    require(log_out, "log_out");
    *log_out = nullptr;
    const auto spec = aav::scanpath_spec_from_json(parse_json(spec_json, "spec"));
    const auto header = aav::header_from_json(header_json_with_kind(parse_json(header_json, "header")));
    *log_out = dup_string(aav::serialize_log(aav::simulate(spec, header)));
  });
}

aav_status aav_stats_file(const char* log_path, size_t top_k, char** report_out) {
  return guarded([&] {
    require(log_path, "log_path");
    require(report_out, "report_out");
    *report_out = nullptr;
    *report_out = dup_string(aav::format_stats(aav::compute_stats(aav::read_log(log_path), top_k)));
  });
}

aav_status aav_server_create(const char* options_json, aav_server** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    const json j = options_json ? parse_json(options_json, "options") : json::object();
    if (!j.is_object()) aav::fail(aav::ErrorCode::InvalidArgument, "server options must be a JSON object");
    aav::ServerOptions opts = aav::server_options_from_env();
    if (j.contains("address")) opts.address = j.at("address").get<std::string>();
    if (j.contains("port")) {
      const int port = j.at("port").get<int>();
      if (port < 0 || port > 65535) aav::fail(aav::ErrorCode::InvalidArgument, "port out of range");
      opts.port = static_cast<unsigned short>(port);
    }
    if (j.contains("tick_ms") && !j.at("tick_ms").is_null()) {
      opts.tick_ms = j.at("tick_ms").get<std::int64_t>();
      if (*opts.tick_ms <= 0) aav::fail(aav::ErrorCode::InvalidArgument, "tick_ms must be positive");
    }
    if (j.contains("log_dir")) opts.log_dir = j.at("log_dir").get<std::string>();
    if (j.contains("threads")) opts.threads = j.at("threads").get<int>();
    if (j.contains("max_pending")) opts.max_pending = j.at("max_pending").get<std::size_t>();
    if (j.contains("handle_signals")) opts.handle_signals = j.at("handle_signals").get<bool>();
    *out = new aav_server{std::make_unique<aav::Server>(std::move(opts))};
  });
}

aav_status aav_server_start(aav_server* server, uint16_t* port_out) {
  return guarded([&] {
    require(server, "server");
    const auto port = server->server->start();
    if (port_out) *port_out = port;
  });
}

aav_status aav_server_wait(aav_server* server) {
  return guarded([&] {
    require(server, "server");
    server->server->wait();
  });
}

aav_status aav_server_stop(aav_server* server) {
  return guarded([&] {
    require(server, "server");
    server->server->stop();
  });
}

void aav_server_destroy(aav_server* server) { delete server; }

}  // extern "C"
