#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace aav {

enum class TriggerMode { AlwaysOn, Explicit, Implicit };

enum class Flag : std::uint8_t { None = 0, Emphasize = 1, DeEmphasize = 2 };

std::string_view to_string(TriggerMode m);
TriggerMode trigger_mode_from_string(std::string_view s);
std::string_view to_string(Flag f);

/// Thresholds act on short-term values normalized by the model cap.
struct ImplicitParams {
  double theta_lo = 0.1;
  double theta_hi = 0.9;
  double hysteresis = 0.05;
  bool emphasis_enabled = true;
  bool deemphasis_enabled = true;

  void validate() const;
  friend bool operator==(const ImplicitParams&, const ImplicitParams&) = default;
};

struct TriggerState {
  TriggerMode mode = TriggerMode::AlwaysOn;
  bool revis_visible = true;
  bool capture_enabled = true;
  std::vector<Flag> flags;

  static TriggerState initial(TriggerMode mode, std::size_t target_count);
  friend bool operator==(const TriggerState&, const TriggerState&) = default;
};

/// Spring-loaded explicit trigger: the revisualization is visible exactly
/// while pressed, and capture is off while it is visible.
TriggerState on_explicit(TriggerState state, bool pressed);

Flag evaluate_implicit(double short_term_norm, Flag flag, const ImplicitParams& params);

/// Re-evaluates every target flag from its cap-normalized short-term value.
void update_flags(TriggerState& state, std::span<const double> short_term_norm,
                  const ImplicitParams& params);

/// Whether samples are accumulated. Implicit mode keeps capturing so that a
/// flagged target can clear its own flag by being looked at.
bool gate_capture(const TriggerState& state);

}  // namespace aav
