#include "aav/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aav/error.hpp"

namespace aav {

std::string_view to_string(Source s) {
  switch (s) {
    case Source::Gaze: return "gaze";
    case Source::Pointer: return "pointer";
    case Source::Touch: return "touch";
    case Source::Head: return "head";
  }
  return "pointer";
}

Source source_from_string(std::string_view s) {
  if (s == "gaze") return Source::Gaze;
  if (s == "pointer") return Source::Pointer;
  if (s == "touch") return Source::Touch;
  if (s == "head") return Source::Head;
  fail(ErrorCode::InvalidArgument, "unknown attention source '" + std::string(s) + "'");
}

void ModelParams::validate() const {
  if (!(gain_per_s > 0.0)) fail(ErrorCode::InvalidArgument, "gain_per_s must be positive");
  if (!(half_life_s > 0.0)) fail(ErrorCode::InvalidArgument, "half_life_s must be positive");
  if (!(cap > 0.0)) fail(ErrorCode::InvalidArgument, "cap must be positive");
  if (!(default_radius_px > 0.0))
    fail(ErrorCode::InvalidArgument, "default_radius_px must be positive");
  if (tick_ms <= 0) fail(ErrorCode::InvalidArgument, "tick_ms must be positive");
}

AttentionState tick(AttentionState state, bool attended, double dt_s,
                    const ModelParams& params) {
  if (!(dt_s > 0.0)) fail(ErrorCode::InvalidArgument, "tick requires dt_s > 0");
  if (attended) {
    state.cumulative += dt_s;
    state.short_term = std::min(params.cap, state.short_term + params.gain_per_s * dt_s);
  } else {
    state.short_term *= std::exp2(-dt_s / params.half_life_s);
  }
  return state;
}

std::vector<double> normalize(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  double max = 0.0;
  for (double v : values) max = std::max(max, v);
  if (max <= 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / max;
  return out;
}

AttentionMap::AttentionMap(std::size_t target_count) : target_count_(target_count) {
  for (auto& layer : layers_) layer.assign(target_count, AttentionState{});
}

const AttentionState& AttentionMap::state(Source source, std::size_t target) const {
  if (target >= target_count_) fail(ErrorCode::OutOfRange, "unknown target id " + std::to_string(target));
  return layers_[static_cast<std::size_t>(source)][target];
}

AttentionState& AttentionMap::state(Source source, std::size_t target) {
  if (target >= target_count_) fail(ErrorCode::OutOfRange, "unknown target id " + std::to_string(target));
  return layers_[static_cast<std::size_t>(source)][target];
}

std::span<const AttentionState> AttentionMap::layer(Source source) const {
  return layers_[static_cast<std::size_t>(source)];
}

std::vector<double> AttentionMap::fused_short_term() const {
  std::vector<double> out(target_count_, 0.0);
  for (const auto& layer : layers_)
    for (std::size_t i = 0; i < target_count_; ++i) out[i] = std::max(out[i], layer[i].short_term);
  return out;
}

std::vector<double> AttentionMap::fused_cumulative() const {
  std::vector<double> out(target_count_, 0.0);
  for (const auto& layer : layers_)
    for (std::size_t i = 0; i < target_count_; ++i) out[i] = std::max(out[i], layer[i].cumulative);
  return out;
}

void step_session(AttentionMap& map, std::span<const std::size_t> targets_hit,
                  std::optional<Source> source, const ModelParams& params) {
  const double dt = params.tick_s();
  std::vector<char> hit(map.size(), 0);
  for (std::size_t t : targets_hit) {
    if (t >= map.size()) fail(ErrorCode::OutOfRange, "unknown target id " + std::to_string(t));
    hit[t] = 1;
  }
  for (std::size_t s = 0; s < kSourceCount; ++s) {
    const auto src = static_cast<Source>(s);
    const bool active = source && *source == src;
    for (std::size_t i = 0; i < map.size(); ++i) {
      auto& st = map.state(src, i);
      st = tick(st, active && hit[i], dt, params);
    }
  }
}

}  // namespace aav
