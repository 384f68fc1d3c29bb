#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "aav/aav.h"

using nlohmann::json;

namespace {

const char* kGrid = R"({"mode":"grid","config":{"width_px":320,"height_px":240,"cell_px":32}})";

struct Freer {
  void operator()(char* p) const { aav_string_free(p); }
};
using owned = std::unique_ptr<char, Freer>;

std::string take(char* p) { return owned(p).get(); }

struct TempDir {
  std::filesystem::path path =
      std::filesystem::temp_directory_path() / ("aav_capi_" + std::to_string(::getpid()));
  TempDir() { std::filesystem::create_directories(path); }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("version string is available") {
  CHECK(std::string(aav_version()) == "1.0.0");
}

TEST_CASE("session lifecycle through the C API") {
  aav_session* s = nullptr;
  REQUIRE(aav_session_create(kGrid, &s) == AAV_OK);
  REQUIRE(s);
  size_t targets = 0;
  CHECK(aav_session_target_count(s, &targets) == AAV_OK);
  CHECK(targets == 80);

  CHECK(aav_session_push_sample(s, 10, 16.0, 16.0, AAV_SOURCE_GAZE, 0.0) == AAV_OK);
  CHECK(aav_session_advance(s, 100) == AAV_OK);
  int64_t ticks = 0;
  CHECK(aav_session_ticks(s, &ticks) == AAV_OK);
  CHECK(ticks == 1);
  double cum = -1, st = -1;
  CHECK(aav_session_state(s, 0, AAV_SOURCE_GAZE, &cum, &st) == AAV_OK);
  CHECK(cum == doctest::Approx(0.1));
  CHECK(st == doctest::Approx(0.1));
  CHECK(aav_session_state(s, 0, AAV_SOURCE_POINTER, &cum, &st) == AAV_OK);
  CHECK(cum == 0.0);
  double cov = 0;
  CHECK(aav_session_coverage(s, &cov) == AAV_OK);
  CHECK(cov == doctest::Approx(1.0 / 80.0));

  CHECK(aav_session_push_center_sample(s, 150, AAV_SOURCE_HEAD, -1.0) == AAV_OK);
  CHECK(aav_session_push_event_json(s, R"({"t":220,"kind":"sample","sample":{"source":"pointer","pos":[300,200]}})") == AAV_OK);
  CHECK(aav_session_advance(s, 300) == AAV_OK);

  char* text = nullptr;
  REQUIRE(aav_session_frame_json(s, &text) == AAV_OK);
  const auto frame = json::parse(take(text));
  CHECK(frame.at("tick") == 3);
  REQUIRE(aav_session_snapshot_json(s, &text) == AAV_OK);
  CHECK(json::parse(take(text)).at("tick") == 3);
  CHECK(aav_session_end(s) == AAV_OK);
  REQUIRE(aav_session_log_jsonl(s, &text) == AAV_OK);
  const std::string log = take(text);
  CHECK(log.find("\"kind\":\"end\"") != std::string::npos);
  CHECK(aav_session_push_sample(s, 400, 1, 1, AAV_SOURCE_GAZE, -1) == AAV_ERR_STATE);
  aav_session_destroy(s);
  aav_session_destroy(nullptr);
}

TEST_CASE("errors map to status codes and last_error") {
  aav_session* s = nullptr;
  CHECK(aav_session_create("{not json", &s) == AAV_ERR_PARSE);
  CHECK(s == nullptr);
  CHECK(std::string(aav_last_error()).size() > 0);
  CHECK(aav_session_create(R"({"mode":"grid","config":{"width_px":-5}})", &s) == AAV_ERR_INVALID_ARGUMENT);
  CHECK(aav_session_create(kGrid, nullptr) == AAV_ERR_INVALID_ARGUMENT);
  REQUIRE(aav_session_create(kGrid, &s) == AAV_OK);
  CHECK(std::string(aav_last_error()).empty());

  CHECK(aav_session_push_sample(s, 0, 1, 1, static_cast<aav_source>(9), -1) == AAV_ERR_INVALID_ARGUMENT);
  CHECK(aav_session_push_trigger(s, 0, 1) == AAV_ERR_STATE);
  CHECK(aav_session_advance(s, 500) == AAV_OK);
  CHECK(aav_session_push_sample(s, 100, 1, 1, AAV_SOURCE_GAZE, -1) == AAV_ERR_STATE);
  CHECK(std::string(aav_last_error()).size() > 0);
  double a = 0, b = 0;
  CHECK(aav_session_state(s, 10000, AAV_SOURCE_GAZE, &a, &b) == AAV_ERR_OUT_OF_RANGE);
  CHECK(aav_session_push_event_json(s, R"({"t":600,"kind":"teleport"})") == AAV_ERR_PARSE);
  int64_t ticks = 0;
  CHECK(aav_session_ticks(nullptr, &ticks) == AAV_ERR_INVALID_ARGUMENT);
  CHECK(aav_session_ticks(s, nullptr) == AAV_ERR_INVALID_ARGUMENT);
  aav_session_destroy(s);
}

TEST_CASE("simulate, replay, render and stats through files") {
  TempDir dir;
  char* text = nullptr;
  REQUIRE(aav_simulate(R"({"seed":7,"fixation_count":40,"radius_px":24})", kGrid, &text) == AAV_OK);
  const std::string log = take(text);
  CHECK(log.find("\"seed\":7") != std::string::npos);
  const auto log_path = dir.file("run.aav.jsonl");
  write_text(log_path, log);

  const auto snap_path = dir.file("run.aav.snap");
  char* summary = nullptr;
  REQUIRE(aav_replay_file(log_path.c_str(), 0, 0, snap_path.c_str(), &text, &summary) == AAV_OK);
  const auto snap = json::parse(take(text));
  const std::string sum = take(summary);
  CHECK(snap.at("tick").get<int64_t>() > 0);
  CHECK(sum.find("mode: grid") != std::string::npos);
  CHECK(std::filesystem::exists(snap_path));

  REQUIRE(aav_replay_file(log_path.c_str(), 1, 0, nullptr, &text, nullptr) == AAV_OK);
  CHECK(json::parse(take(text)).at("tick") == 0);

  char* svg = nullptr;
  REQUIRE(aav_render_svg(snap_path.c_str(), R"({"style":"heatmap"})", &svg) == AAV_OK);
  const std::string heat = take(svg);
  CHECK(heat.rfind("<svg", 0) == 0);
  CHECK(heat.find("<rect") != std::string::npos);
  REQUIRE(aav_render_svg(snap_path.c_str(), R"({"style":"contour","levels":[0.5]})", &svg) == AAV_OK);
  CHECK(take(svg).find("<path") != std::string::npos);
  REQUIRE(aav_render_svg(snap_path.c_str(), nullptr, &svg) == AAV_OK);
  take(svg);
  CHECK(aav_render_svg(snap_path.c_str(), R"({"style":"hologram"})", &svg) == AAV_ERR_INVALID_ARGUMENT);

  char* report = nullptr;
  REQUIRE(aav_stats_file(log_path.c_str(), 3, &report) == AAV_OK);
  CHECK(take(report).find("coverage:") != std::string::npos);

  CHECK(aav_replay_file(dir.file("missing.aav.jsonl").c_str(), 0, 0, nullptr, nullptr, &summary) == AAV_ERR_IO);
  write_text(dir.file("bad.aav.jsonl"), "{\"kind\":\"header\"}\n{oops\n");
  CHECK(aav_stats_file(dir.file("bad.aav.jsonl").c_str(), 3, &report) == AAV_ERR_PARSE);
  CHECK(std::string(aav_last_error()).find("line 2") != std::string::npos);
}

TEST_CASE("session log written through the C API replays identically") {
  TempDir dir;
  aav_session* s = nullptr;
  REQUIRE(aav_session_create(kGrid, &s) == AAV_OK);
  for (int i = 0; i < 50; ++i)
    REQUIRE(aav_session_push_sample(s, i * 37, 10.0 + 6 * i, 20.0 + 4 * i, AAV_SOURCE_GAZE, 30.0) == AAV_OK);
  REQUIRE(aav_session_end(s) == AAV_OK);
  const auto path = dir.file("live.aav.jsonl");
  REQUIRE(aav_session_write_log(s, path.c_str()) == AAV_OK);
  char* live = nullptr;
  REQUIRE(aav_session_snapshot_json(s, &live) == AAV_OK);
  char* replayed = nullptr;
  REQUIRE(aav_replay_file(path.c_str(), 0, 0, nullptr, &replayed, nullptr) == AAV_OK);
  CHECK(take(live) == take(replayed));
  aav_session_destroy(s);
}

TEST_CASE("server starts on a free port and stops") {
  aav_server* srv = nullptr;
  REQUIRE(aav_server_create(R"({"address":"127.0.0.1","port":0,"tick_ms":50})", &srv) == AAV_OK);
  uint16_t port = 0;
  REQUIRE(aav_server_start(srv, &port) == AAV_OK);
  CHECK(port != 0);
  CHECK(aav_server_stop(srv) == AAV_OK);
  CHECK(aav_server_wait(srv) == AAV_OK);
  aav_server_destroy(srv);
  CHECK(aav_server_create(R"({"port":70000})", &srv) == AAV_ERR_INVALID_ARGUMENT);
  CHECK(aav_server_create(R"({"address":"nowhere"})", &srv) == AAV_OK);
  CHECK(aav_server_start(srv, &port) == AAV_ERR_INVALID_ARGUMENT);
  aav_server_destroy(srv);
}
