// JSON mapping of headers, events, frames and snapshots.

#include <nlohmann/json.hpp>

#include "aav/error.hpp"
#include "aav/session.hpp"

namespace aav {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

json vec3(Vec3 v) { return json::array({v.x, v.y, v.z}); }
Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::Parse, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json params_json(const ModelParams& p) {
  return {{"gain_per_s", p.gain_per_s},
          {"half_life_s", p.half_life_s},
          {"cap", p.cap},
          {"default_radius_px", p.default_radius_px},
          {"tick_ms", p.tick_ms}};
}

ModelParams params_from(const json& j) {
  ModelParams p;
  if (j.is_null()) return p;
  p.gain_per_s = get_or(j, "gain_per_s", p.gain_per_s);
  p.half_life_s = get_or(j, "half_life_s", p.half_life_s);
  p.cap = get_or(j, "cap", p.cap);
  p.default_radius_px = get_or(j, "default_radius_px", p.default_radius_px);
  p.tick_ms = get_or(j, "tick_ms", p.tick_ms);
  return p;
}

json implicit_json(const ImplicitParams& p) {
  return {{"theta_lo", p.theta_lo},
          {"theta_hi", p.theta_hi},
          {"hysteresis", p.hysteresis},
          {"emphasis", p.emphasis_enabled},
          {"deemphasis", p.deemphasis_enabled}};
}

ImplicitParams implicit_from(const json& j) {
  ImplicitParams p;
  if (j.is_null()) return p;
  p.theta_lo = get_or(j, "theta_lo", p.theta_lo);
  p.theta_hi = get_or(j, "theta_hi", p.theta_hi);
  p.hysteresis = get_or(j, "hysteresis", p.hysteresis);
  p.emphasis_enabled = get_or(j, "emphasis", p.emphasis_enabled);
  p.deemphasis_enabled = get_or(j, "deemphasis", p.deemphasis_enabled);
  return p;
}

json object_json(const SceneObject& o) {
  json verts = json::array();
  for (const auto& v : o.vertices) verts.push_back(vec3(v));
  json faces = json::array();
  for (const auto& f : o.faces) faces.push_back({f.a, f.b, f.c});
  return {{"object_id", o.object_id}, {"vertices", std::move(verts)}, {"faces", std::move(faces)}};
}

SceneObject object_from(const json& j, int fallback_id) {
  if (j.is_string()) return parse_obj(j.get<std::string>(), fallback_id);
  if (j.contains("obj")) return parse_obj(j.at("obj").get<std::string>(), get_or(j, "object_id", fallback_id));
  SceneObject o;
  o.object_id = get_or(j, "object_id", fallback_id);
  for (const auto& v : j.at("vertices")) o.vertices.push_back(vec3(v));
  for (const auto& f : j.at("faces")) {
    if (!f.is_array() || f.size() != 3) fail(ErrorCode::Parse, "faces must be index triples");
    o.faces.push_back({f[0].get<std::uint32_t>(), f[1].get<std::uint32_t>(), f[2].get<std::uint32_t>()});
  }
  return o;
}

json ring_json(const ContourRing& r) {
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back({p.x, p.y});
  return {{"level", r.iso_level}, {"closed", r.closed}, {"points", std::move(pts)}};
}

json rgb_json(const Rgb& c) { return {c.r, c.g, c.b}; }

}  // namespace

std::string_view to_string(SessionMode m) { return m == SessionMode::Grid ? "grid" : "marks"; }

json camera_to_json(const Camera& c) {
  return {{"position", vec3(c.position)},
          {"forward", vec3(c.forward)},
          {"up", vec3(c.up)},
          {"fov_y_deg", c.fov_y_deg},
          {"near", c.near_plane},
          {"far", c.far_plane},
          {"viewport", {c.viewport_width, c.viewport_height}}};
}

Camera camera_from_json(const json& j) {
  Camera c;
  if (j.is_null()) return c;
  if (j.contains("position")) c.position = vec3(j.at("position"));
  if (j.contains("forward")) c.forward = vec3(j.at("forward"));
  if (j.contains("up")) c.up = vec3(j.at("up"));
  c.fov_y_deg = get_or(j, "fov_y_deg", c.fov_y_deg);
  c.near_plane = get_or(j, "near", c.near_plane);
  c.far_plane = get_or(j, "far", c.far_plane);
  if (j.contains("viewport")) {
    c.viewport_width = j.at("viewport").at(0).get<int>();
    c.viewport_height = j.at("viewport").at(1).get<int>();
  }
  return c;
}

json header_to_json(const SessionHeader& h) {
  json j = {{"v", h.v},
            {"kind", "header"},
            {"mode", to_string(h.mode)},
            {"params", params_json(h.params)},
            {"trigger_mode", to_string(h.trigger_mode)},
            {"implicit", implicit_json(h.implicit)},
            {"frame",
             {{"contour_levels", h.frame.contour_levels},
              {"mesh_darken", h.frame.mesh.darken_gain},
              {"mesh_blur_px", h.frame.mesh.blur_px}}},
            {"seed", h.seed}};
  if (h.mode == SessionMode::Grid) {
    j["config"] = {{"width_px", h.grid.width_px}, {"height_px", h.grid.height_px}, {"cell_px", h.grid.cell_px}};
  } else {
    json scene = json::array();
    for (const auto& o : h.scene) scene.push_back(object_json(o));
    j["config"] = {{"scene", std::move(scene)},
                   {"camera", camera_to_json(h.camera)},
                   {"pick", {h.marks.pick.width, h.marks.pick.height}},
                   {"center_radius_fraction", h.marks.center_radius_fraction}};
  }
  return j;
}

SessionHeader header_from_json(const json& j) {
  SessionHeader h;
  h.v = get_or(j, "v", kFormatVersion);
  if (h.v != kFormatVersion) fail(ErrorCode::Parse, "unsupported format version " + std::to_string(h.v));
  const std::string mode = get_or<std::string>(j, "mode", "grid");
  if (mode == "grid") {
    h.mode = SessionMode::Grid;
  } else if (mode == "marks") {
    h.mode = SessionMode::Marks;
  } else {
    fail(ErrorCode::InvalidArgument, "unknown session mode '" + mode + "'");
  }
  h.params = params_from(j.value("params", json()));
  h.trigger_mode = trigger_mode_from_string(get_or<std::string>(j, "trigger_mode", "always_on"));
  h.implicit = implicit_from(j.value("implicit", json()));
  if (const auto it = j.find("frame"); it != j.end()) {
    h.frame.contour_levels = get_or(*it, "contour_levels", h.frame.contour_levels);
    h.frame.mesh.darken_gain = get_or(*it, "mesh_darken", h.frame.mesh.darken_gain);
    h.frame.mesh.blur_px = get_or(*it, "mesh_blur_px", h.frame.mesh.blur_px);
  }
  h.seed = get_or<std::uint64_t>(j, "seed", 0);
  const json config = j.value("config", json::object());
  if (h.mode == SessionMode::Grid) {
    h.grid.width_px = get_or(config, "width_px", h.grid.width_px);
    h.grid.height_px = get_or(config, "height_px", h.grid.height_px);
    h.grid.cell_px = get_or(config, "cell_px", h.grid.cell_px);
  } else {
    int next_id = 1;
    for (const auto& o : config.value("scene", json::array())) {
      h.scene.push_back(object_from(o, next_id));
      next_id = h.scene.back().object_id + 1;
    }
    h.camera = camera_from_json(config.value("camera", json()));
    if (config.contains("pick")) {
      h.marks.pick.width = config.at("pick").at(0).get<int>();
      h.marks.pick.height = config.at("pick").at(1).get<int>();
    }
    h.marks.center_radius_fraction =
        get_or(config, "center_radius_fraction", h.marks.center_radius_fraction);
  }
  return h;
}

json sample_to_json(const AttentionSample& s) {
  json j = {{"t", s.timestamp_ms}, {"source", to_string(s.source)}};
  if (s.position)
    j["pos"] = {s.position->x, s.position->y};
  else
    j["pos"] = "center";
  if (s.radius_px) j["radius"] = *s.radius_px;
  return j;
}

AttentionSample sample_from_json(const json& j) {
  AttentionSample s;
  s.timestamp_ms = get_or<std::int64_t>(j, "t", 0);
  s.source = source_from_string(get_or<std::string>(j, "source", "pointer"));
  const json& pos = j.at("pos");
  if (pos.is_string()) {
    if (pos.get<std::string>() != "center") fail(ErrorCode::Parse, "sample position must be [x, y] or \"center\"");
  } else {
    if (!pos.is_array() || pos.size() != 2) fail(ErrorCode::Parse, "sample position must be [x, y]");
    s.position = Point2{pos[0].get<double>(), pos[1].get<double>()};
  }
  if (j.contains("radius") && !j.at("radius").is_null()) {
    s.radius_px = j.at("radius").get<double>();
    if (*s.radius_px < 0.0) fail(ErrorCode::InvalidArgument, "sample radius must be non-negative");
  }
  return s;
}

json event_to_json(const Event& e) {
  json j = {{"t", e.timestamp_ms}, {"kind", e.kind()}};
  if (const auto* s = std::get_if<AttentionSample>(&e.payload)) {
    json sj = sample_to_json(*s);
    sj.erase("t");
    j["sample"] = std::move(sj);
  } else if (const auto* t = std::get_if<TriggerEvent>(&e.payload)) {
    j["pressed"] = t->pressed;
  } else if (const auto* c = std::get_if<Camera>(&e.payload)) {
    j["camera"] = camera_to_json(*c);
  }
  return j;
}

Event event_from_json(const json& j) {
  Event e;
  e.timestamp_ms = j.at("t").get<std::int64_t>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sample") {
    json sj = j.at("sample");
    sj["t"] = e.timestamp_ms;
    e.payload = sample_from_json(sj);
  } else if (kind == "trigger") {
    e.payload = TriggerEvent{j.at("pressed").get<bool>()};
  } else if (kind == "camera") {
    e.payload = camera_from_json(j.at("camera"));
  } else if (kind == "end") {
    e.payload = EndEvent{};
  } else {
    fail(ErrorCode::Parse, "unknown event kind '" + kind + "'");
  }
  return e;
}

json frame_to_json(const RevisFrame& f) {
  json j = {{"tick", f.tick},
            {"t_ms", f.t_ms},
            {"trigger_mode", to_string(f.trigger_mode)},
            {"short_term", f.short_term},
            {"cumulative", f.cumulative}};
  json flags = json::array();
  for (Flag fl : f.flags) flags.push_back(static_cast<int>(fl));
  j["flags"] = std::move(flags);
  if (!f.styles.empty() || !f.faces.empty()) {
    json styles = json::array();
    for (std::size_t i = 0; i < f.styles.size(); ++i) {
      styles.push_back({{"object", f.faces[i].object_id},
                        {"face", f.faces[i].face_id},
                        {"mode", to_string(f.styles[i].mode)},
                        {"color", rgb_json(f.styles[i].color)},
                        {"saturation", f.styles[i].saturation_factor}});
    }
    j["styles"] = std::move(styles);
  } else {
    json rings = json::array();
    for (const auto& r : f.contours) rings.push_back(ring_json(r));
    j["contours"] = std::move(rings);
    j["marginals"] = {{"x", f.marginal_x.values}, {"y", f.marginal_y.values}};
    json mesh = json::array();
    for (const auto& m : f.mesh) mesh.push_back({m.saturation, m.blur_px, m.darken});
    j["mesh"] = std::move(mesh);
  }
  return j;
}

json snapshot_to_json(const Snapshot& s) {
  json layers = json::object();
  for (std::size_t src = 0; src < kSourceCount; ++src) {
    json layer = json::array();
    for (const auto& st : s.map.layer(static_cast<Source>(src))) layer.push_back({st.cumulative, st.short_term});
    layers[std::string(to_string(static_cast<Source>(src)))] = std::move(layer);
  }
  json flags = json::array();
  for (Flag f : s.trigger.flags) flags.push_back(static_cast<int>(f));
  json faces = json::array();
  for (const auto& k : s.faces) faces.push_back({k.object_id, k.face_id});
  json j = {{"v", s.v},
            {"kind", "snapshot"},
            {"timestamp_ms", s.timestamp_ms},
            {"tick", s.tick},
            {"header", header_to_json(s.header)},
            {"targets", s.map.size()},
            {"layers", std::move(layers)},
            {"trigger",
             {{"mode", to_string(s.trigger.mode)},
              {"revis_visible", s.trigger.revis_visible},
              {"capture_enabled", s.trigger.capture_enabled},
              {"flags", std::move(flags)}}}};
  if (s.header.mode == SessionMode::Marks) {
    j["faces"] = std::move(faces);
    j["camera"] = camera_to_json(s.camera);
  }
  return j;
}

Snapshot snapshot_from_json(const json& j) {
  Snapshot s;
  s.v = j.at("v").get<int>();
  if (s.v != kFormatVersion) fail(ErrorCode::Parse, "unsupported snapshot version " + std::to_string(s.v));
  s.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
  s.tick = j.at("tick").get<std::int64_t>();
  s.header = header_from_json(j.at("header"));
  const auto n = j.at("targets").get<std::size_t>();
  s.map = AttentionMap(n);
  for (std::size_t src = 0; src < kSourceCount; ++src) {
    const auto source = static_cast<Source>(src);
    const json& layer = j.at("layers").at(std::string(to_string(source)));
    if (layer.size() != n) fail(ErrorCode::Parse, "snapshot layer size mismatch");
    for (std::size_t i = 0; i < n; ++i)
      s.map.state(source, i) = {layer[i].at(0).get<double>(), layer[i].at(1).get<double>()};
  }
  const json& t = j.at("trigger");
  s.trigger.mode = trigger_mode_from_string(t.at("mode").get<std::string>());
  s.trigger.revis_visible = t.at("revis_visible").get<bool>();
  s.trigger.capture_enabled = t.at("capture_enabled").get<bool>();
  for (const auto& f : t.at("flags")) {
    const int v = f.get<int>();
    if (v < 0 || v > 2) fail(ErrorCode::Parse, "invalid trigger flag");
    s.trigger.flags.push_back(static_cast<Flag>(v));
  }
  if (j.contains("faces"))
    for (const auto& k : j.at("faces")) s.faces.push_back({k.at(0).get<int>(), k.at(1).get<int>()});
  if (j.contains("camera")) s.camera = camera_from_json(j.at("camera"));
  return s;
}

}  // namespace aav
