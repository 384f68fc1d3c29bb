#include "aav/triggers.hpp"

#include <string>

#include "aav/error.hpp"

namespace aav {

std::string_view to_string(TriggerMode m) {
  switch (m) {
    case TriggerMode::AlwaysOn: return "always_on";
    case TriggerMode::Explicit: return "explicit";
    case TriggerMode::Implicit: return "implicit";
  }
  return "always_on";
}

TriggerMode trigger_mode_from_string(std::string_view s) {
  if (s == "always_on" || s == "always-on") return TriggerMode::AlwaysOn;
  if (s == "explicit") return TriggerMode::Explicit;
  if (s == "implicit") return TriggerMode::Implicit;
  fail(ErrorCode::InvalidArgument, "unknown trigger mode '" + std::string(s) + "'");
}

std::string_view to_string(Flag f) {
  switch (f) {
    case Flag::None: return "none";
    case Flag::Emphasize: return "emphasize";
    case Flag::DeEmphasize: return "deemphasize";
  }
  return "none";
}

void ImplicitParams::validate() const {
  if (!(theta_lo > 0.0 && theta_lo < 1.0 && theta_hi > 0.0 && theta_hi < 1.0))
    fail(ErrorCode::InvalidArgument, "implicit thresholds must lie in (0, 1)");
  if (!(theta_lo < theta_hi)) fail(ErrorCode::InvalidArgument, "theta_lo must be below theta_hi");
  if (!(hysteresis > 0.0)) fail(ErrorCode::InvalidArgument, "hysteresis must be positive");
  if (!(theta_lo + hysteresis < theta_hi - hysteresis))
    fail(ErrorCode::InvalidArgument, "hysteresis bands overlap");
}

TriggerState TriggerState::initial(TriggerMode mode, std::size_t target_count) {
  TriggerState s;
  s.mode = mode;
  s.revis_visible = mode != TriggerMode::Explicit;
  s.capture_enabled = true;
  s.flags.assign(target_count, Flag::None);
  return s;
}

TriggerState on_explicit(TriggerState state, bool pressed) {
  if (state.mode != TriggerMode::Explicit)
    fail(ErrorCode::State, "explicit trigger used in " + std::string(to_string(state.mode)) + " mode");
  state.revis_visible = pressed;
  state.capture_enabled = !pressed;
  return state;
}

Flag evaluate_implicit(double v, Flag flag, const ImplicitParams& p) {
  switch (flag) {
    case Flag::None:
      if (p.emphasis_enabled && v < p.theta_lo) return Flag::Emphasize;
      if (p.deemphasis_enabled && v > p.theta_hi) return Flag::DeEmphasize;
      return Flag::None;
    case Flag::Emphasize:
      return (v >= p.theta_lo + p.hysteresis || !p.emphasis_enabled) ? Flag::None : flag;
    case Flag::DeEmphasize:
      return (v <= p.theta_hi - p.hysteresis || !p.deemphasis_enabled) ? Flag::None : flag;
  }
  return flag;
}

void update_flags(TriggerState& state, std::span<const double> values, const ImplicitParams& params) {
  if (state.mode != TriggerMode::Implicit) return;
  if (values.size() != state.flags.size())
    fail(ErrorCode::InvalidArgument, "flag/value count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i)
    state.flags[i] = evaluate_implicit(values[i], state.flags[i], params);
}

bool gate_capture(const TriggerState& state) {
  switch (state.mode) {
    case TriggerMode::AlwaysOn: return true;
    case TriggerMode::Explicit: return state.capture_enabled;
    case TriggerMode::Implicit: return true;
  }
  return true;
}

}  // namespace aav
