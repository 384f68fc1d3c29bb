#include <doctest.h>

#include <random>

#include "aav/error.hpp"
#include "aav/session.hpp"
#include "aav/triggers.hpp"

using namespace aav;

namespace {

SessionHeader grid_header(TriggerMode mode) {
  SessionHeader h;
  h.grid = {320.0, 320.0, 32.0};
  h.trigger_mode = mode;
  return h;
}

AttentionSample sample(std::int64_t t, double x, double y, double r = 20.0) {
  AttentionSample s;
  s.timestamp_ms = t;
  s.position = Point2{x, y};
  s.radius_px = r;
  s.source = Source::Gaze;
  return s;
}

}  // namespace

TEST_CASE("explicit trigger examples") {
  auto s = TriggerState::initial(TriggerMode::Explicit, 3);
  CHECK(!s.revis_visible);
  CHECK(s.capture_enabled);
  s = on_explicit(s, true);
  CHECK(s.revis_visible);
  CHECK(!s.capture_enabled);
  CHECK(!gate_capture(s));
  s = on_explicit(s, true);
  CHECK(s.revis_visible);
  s = on_explicit(s, false);
  CHECK(!s.revis_visible);
  CHECK(s.capture_enabled);
  CHECK(gate_capture(s));
}

TEST_CASE("explicit trigger is rejected in other modes") {
  CHECK_THROWS_AS(on_explicit(TriggerState::initial(TriggerMode::AlwaysOn, 1), true), Error);
  CHECK_THROWS_AS(on_explicit(TriggerState::initial(TriggerMode::Implicit, 1), true), Error);
}

TEST_CASE("always-on keeps capturing while visible") {
  const auto s = TriggerState::initial(TriggerMode::AlwaysOn, 2);
  CHECK(s.revis_visible);
  CHECK(gate_capture(s));
}

TEST_CASE("implicit threshold examples") {
  const ImplicitParams p;
  CHECK(p.theta_lo == 0.1);
  CHECK(p.theta_hi == 0.9);
  CHECK(p.hysteresis == 0.05);
  CHECK(evaluate_implicit(0.05, Flag::None, p) == Flag::Emphasize);
  CHECK(evaluate_implicit(0.95, Flag::None, p) == Flag::DeEmphasize);
  CHECK(evaluate_implicit(0.5, Flag::None, p) == Flag::None);
}

TEST_CASE("implicit transitions honour the hysteresis band") {
  const ImplicitParams p;
  CHECK(evaluate_implicit(0.12, Flag::Emphasize, p) == Flag::Emphasize);
  CHECK(evaluate_implicit(p.theta_lo + p.hysteresis, Flag::Emphasize, p) == Flag::None);
  CHECK(evaluate_implicit(0.88, Flag::DeEmphasize, p) == Flag::DeEmphasize);
  CHECK(evaluate_implicit(p.theta_hi - p.hysteresis, Flag::DeEmphasize, p) == Flag::None);
  CHECK(evaluate_implicit(0.1, Flag::None, p) == Flag::None);
  CHECK(evaluate_implicit(0.9, Flag::None, p) == Flag::None);
}

TEST_CASE("disabled emphasis or de-emphasis never flags") {
  ImplicitParams p;
  p.emphasis_enabled = false;
  CHECK(evaluate_implicit(0.0, Flag::None, p) == Flag::None);
  CHECK(evaluate_implicit(0.0, Flag::Emphasize, p) == Flag::None);
  p = {};
  p.deemphasis_enabled = false;
  CHECK(evaluate_implicit(1.0, Flag::None, p) == Flag::None);
}

TEST_CASE("implicit parameters are validated") {
  ImplicitParams p;
  p.hysteresis = 0.5;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.theta_lo = 0.95;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.theta_hi = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("no chattering inside the hysteresis band") {
  const ImplicitParams p;
  std::mt19937_64 rng(12);
  for (Flag start : {Flag::None, Flag::Emphasize}) {
    std::uniform_real_distribution<double> band(p.theta_lo, p.theta_lo + p.hysteresis);
    Flag f = start;
    int toggles = 0;
    for (int i = 0; i < 1000; ++i) {
      double v = band(rng);
      if (v == p.theta_lo) continue;
      const Flag next = evaluate_implicit(v, f, p);
      toggles += next != f;
      f = next;
    }
    CHECK(toggles <= 1);
  }
  // Straddling theta_lo from just below: one transition in, none out.
  Flag f = Flag::None;
  int toggles = 0;
  std::uniform_real_distribution<double> wide(p.theta_lo - 0.04, p.theta_lo + p.hysteresis - 1e-9);
  for (int i = 0; i < 1000; ++i) {
    const Flag next = evaluate_implicit(wide(rng), f, p);
    toggles += next != f;
    f = next;
  }
  CHECK(toggles <= 1);
}

TEST_CASE("implicit flags are a deterministic function of the value sequence") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> seq(500);
  for (auto& v : seq) v = u(rng);
  auto run = [&] {
    std::vector<Flag> out;
    Flag f = Flag::None;
    for (double v : seq) out.push_back(f = evaluate_implicit(v, f, {}));
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("update_flags acts only in implicit mode") {
  auto s = TriggerState::initial(TriggerMode::AlwaysOn, 2);
  const std::vector<double> v{0.0, 1.0};
  update_flags(s, v, {});
  CHECK(s.flags == std::vector<Flag>{Flag::None, Flag::None});
  s = TriggerState::initial(TriggerMode::Implicit, 2);
  update_flags(s, v, {});
  CHECK(s.flags == std::vector<Flag>{Flag::Emphasize, Flag::DeEmphasize});
  CHECK_THROWS_AS(update_flags(s, std::vector<double>{0.5}, {}), Error);
}

TEST_CASE("explicit session drops exactly the pressed-interval samples") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> pos(0.0, 320.0);
  for (int trial = 0; trial < 20; ++trial) {
    Session explicit_session(grid_header(TriggerMode::Explicit));
    Session filtered(grid_header(TriggerMode::AlwaysOn));
    bool pressed = false;
    std::int64_t t = 0;
    std::size_t dropped = 0;
    for (int i = 0; i < 300; ++i) {
      t += static_cast<std::int64_t>(rng() % 60);
      if (rng() % 10 == 0) {
        pressed = !pressed;
        explicit_session.ingest(trigger_event(t, pressed));
        continue;
      }
      const auto s = sample(t, pos(rng), pos(rng));
      explicit_session.ingest(sample_event(s));
      if (pressed)
        ++dropped;
      else
        filtered.ingest(sample_event(s));
    }
    explicit_session.advance_to(t + 100);
    filtered.advance_to(t + 100);
    CHECK(explicit_session.dropped_samples() == dropped);
    CHECK(explicit_session.map().fused_cumulative() == filtered.map().fused_cumulative());
  }
}

TEST_CASE("explicit press makes frames flow and release stops them") {
  Session s(grid_header(TriggerMode::Explicit));
  int frames = 0;
  s.set_frame_sink([&](const RevisFrame&) { ++frames; });
  s.advance_to(500);
  CHECK(frames == 0);
  s.ingest(trigger_event(500, true));
  s.advance_to(1000);
  CHECK(frames == 5);
  s.ingest(trigger_event(1000, false));
  s.advance_to(1500);
  CHECK(frames == 5);
}

TEST_CASE("trigger events outside explicit mode are rejected without effect") {
  Session s(grid_header(TriggerMode::AlwaysOn));
  CHECK_THROWS_AS(s.ingest(trigger_event(0, true)), Error);
  CHECK(s.log().events.empty());
}

TEST_CASE("an emphasized target keeps capturing until its flag clears") {
  auto h = grid_header(TriggerMode::Implicit);
  h.params.gain_per_s = 0.25;
  Session s(h);
  const std::size_t target = s.grid()->index({5, 5});
  s.advance_to(100);
  CHECK(s.trigger().flags[target] == Flag::Emphasize);
  Flag prev = Flag::Emphasize;
  bool cleared = false;
  for (int k = 1; k <= 20; ++k) {
    s.ingest(sample_event(sample(k * 100, 5 * 32 + 16, 5 * 32 + 16, 0.0)));
    s.advance_to((k + 1) * 100);
    const double v = s.map().state(Source::Gaze, target).short_term / h.params.cap;
    const Flag want = evaluate_implicit(v, prev, h.implicit);
    CHECK(s.trigger().flags[target] == want);
    if (prev == Flag::Emphasize && want == Flag::None) {
      cleared = true;
      CHECK(v >= h.implicit.theta_lo + h.implicit.hysteresis);
    }
    prev = want;
  }
  CHECK(cleared);
  CHECK(s.dropped_samples() == 0);
}
