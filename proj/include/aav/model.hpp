#pragma once

// Attention value model shared by grid cells and scene faces: every target
// carries a non-decaying cumulative dwell time and a capped short-term value
// that rises while attended and halves every `half_life_s` otherwise.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace aav {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

enum class Source : std::uint8_t { Gaze = 0, Pointer = 1, Touch = 2, Head = 3 };

inline constexpr std::size_t kSourceCount = 4;

std::string_view to_string(Source s);
Source source_from_string(std::string_view s);

/// One attention measurement. An empty `position` is the screen-center
/// sentinel; an empty `radius_px` selects the context's default radius.
struct AttentionSample {
  std::int64_t timestamp_ms = 0;
  std::optional<Point2> position;
  Source source = Source::Pointer;
  std::optional<double> radius_px;

  friend bool operator==(const AttentionSample&, const AttentionSample&) = default;
};

struct AttentionState {
  double cumulative = 0.0;
  double short_term = 0.0;

  friend bool operator==(const AttentionState&, const AttentionState&) = default;
};

struct ModelParams {
  double gain_per_s = 1.0;
  double half_life_s = 10.0;
  double cap = 1.0;
  double default_radius_px = 48.0;
  std::int64_t tick_ms = 100;

  /// Throws Error(InvalidArgument) unless every field is strictly positive.
  void validate() const;
  double tick_s() const { return static_cast<double>(tick_ms) / 1000.0; }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Advances one target by `dt_s` seconds.
AttentionState tick(AttentionState state, bool attended, double dt_s,
                    const ModelParams& params);

/// Divides by the maximum; an all-zero (or empty) input maps to zeros.
std::vector<double> normalize(std::span<const double> values);

/// Dense attention map over `target_count` targets, with one independent
/// layer of states per attention source.
class AttentionMap {
 public:
  AttentionMap() = default;
  explicit AttentionMap(std::size_t target_count);

  std::size_t size() const { return target_count_; }

  const AttentionState& state(Source source, std::size_t target) const;
  AttentionState& state(Source source, std::size_t target);
  std::span<const AttentionState> layer(Source source) const;

  /// Element-wise maximum over sources; this is the fused view revisualization
  /// consumes.
  std::vector<double> fused_short_term() const;
  std::vector<double> fused_cumulative() const;

  friend bool operator==(const AttentionMap&, const AttentionMap&) = default;

 private:
  std::size_t target_count_ = 0;
  std::array<std::vector<AttentionState>, kSourceCount> layers_;
};

/// Applies one tick to every target of every layer. A target is attended iff
/// it appears in `targets_hit` and the layer belongs to `source`; with no
/// source (no effective sample this tick) every layer decays.
void step_session(AttentionMap& map, std::span<const std::size_t> targets_hit,
                  std::optional<Source> source, const ModelParams& params);

}  // namespace aav
