#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aav/grid.hpp"
#include "aav/session.hpp"

namespace aav {

struct Hotspot {
  Rect region;
  double weight = 1.0;
};

/// Synthetic scanpath: stationary fixations joined by instantaneous
/// saccades. Fixation targets are uniform over the mount, or drawn from the
/// weighted hotspot regions when any are given.
struct ScanpathSpec {
  std::uint64_t seed = 1;
  int fixation_count = 100;
  double duration_mean_ms = 250.0;
  double duration_sd_ms = 80.0;
  std::vector<Hotspot> hotspots;
  Source source = Source::Gaze;
  std::optional<double> radius_px;

  void validate() const;
};

ScanpathSpec scanpath_spec_from_json(const nlohmann::json& j);

/// Emits one sample per tick for the duration of each fixation. The log's
/// header is `header` with its seed replaced by the spec's.
SessionLog simulate(const ScanpathSpec& spec, SessionHeader header);

}  // namespace aav
