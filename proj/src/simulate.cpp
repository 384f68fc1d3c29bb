#include "aav/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "aav/error.hpp"

namespace aav {

void ScanpathSpec::validate() const {
  if (fixation_count < 1) fail(ErrorCode::InvalidArgument, "fixation_count must be positive");
  if (!(duration_mean_ms > 0.0)) fail(ErrorCode::InvalidArgument, "fixation duration mean must be positive");
  if (!(duration_sd_ms >= 0.0)) fail(ErrorCode::InvalidArgument, "fixation duration sd must be non-negative");
  for (const auto& h : hotspots) {
    if (!(h.weight >= 0.0)) fail(ErrorCode::InvalidArgument, "hotspot weights must be non-negative");
    if (!(h.region.x1 >= h.region.x0 && h.region.y1 >= h.region.y0))
      fail(ErrorCode::InvalidArgument, "hotspot region is inverted");
  }
  if (!hotspots.empty() &&
      std::none_of(hotspots.begin(), hotspots.end(), [](const Hotspot& h) { return h.weight > 0.0; }))
    fail(ErrorCode::InvalidArgument, "at least one hotspot needs positive weight");
  if (radius_px && *radius_px < 0.0) fail(ErrorCode::InvalidArgument, "radius must be non-negative");
}

ScanpathSpec scanpath_spec_from_json(const nlohmann::json& j) {
  ScanpathSpec s;
  s.seed = j.value("seed", s.seed);
  s.fixation_count = j.value("fixation_count", s.fixation_count);
  s.duration_mean_ms = j.value("duration_mean_ms", s.duration_mean_ms);
  s.duration_sd_ms = j.value("duration_sd_ms", s.duration_sd_ms);
  s.source = source_from_string(j.value("source", std::string("gaze")));
  if (j.contains("radius_px")) s.radius_px = j.at("radius_px").get<double>();
  const auto targets = j.value("targets", nlohmann::json("uniform"));
  if (targets.is_array()) {
    for (const auto& h : targets) {
      Hotspot hs;
      const double x = h.at("x").get<double>(), y = h.at("y").get<double>();
      hs.region = {x, y, x + h.at("w").get<double>(), y + h.at("h").get<double>()};
      hs.weight = h.value("weight", 1.0);
      s.hotspots.push_back(hs);
    }
  } else if (targets != "uniform") {
    fail(ErrorCode::InvalidArgument, "targets must be \"uniform\" or a hotspot list");
  }
  s.validate();
  return s;
}

SessionLog simulate(const ScanpathSpec& spec, SessionHeader header) {
  spec.validate();
  header.seed = spec.seed;
  header.validate();
  SessionLog log;
  log.header = header;

  double width = header.grid.width_px, height = header.grid.height_px;
  if (header.mode == SessionMode::Marks) {
    width = header.camera.viewport_width;
    height = header.camera.viewport_height;
  }
  const std::int64_t tick_ms = header.params.tick_ms;

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> duration(spec.duration_mean_ms, spec.duration_sd_ms);
  std::vector<double> weights;
  for (const auto& h : spec.hotspots) weights.push_back(h.weight);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

  std::int64_t t = 0;
  for (int i = 0; i < spec.fixation_count; ++i) {
    Rect region{0.0, 0.0, width, height};
    if (!spec.hotspots.empty()) region = spec.hotspots[pick(rng)].region;
    const double x = region.x0 + unit(rng) * (region.x1 - region.x0);
    const double y = region.y0 + unit(rng) * (region.y1 - region.y0);
    const auto dur = std::max<std::int64_t>(tick_ms, std::llround(duration(rng)));
    for (std::int64_t dt = 0; dt < dur; dt += tick_ms) {
      AttentionSample s;
      s.timestamp_ms = t + dt;
      s.position = Point2{x, y};
      s.source = spec.source;
      s.radius_px = spec.radius_px;
      log.record(sample_event(s));
    }
    t += dur;
  }
  return log;
}

}  // namespace aav
