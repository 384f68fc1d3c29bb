// aav: command-line front end over the C API.
//
// Exit status: 0 on success, 1 on data or runtime errors, 2 on usage errors.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aav/aav.h"

using nlohmann::json;

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct Freer {
  void operator()(char* p) const { aav_string_free(p); }
};
using CString = std::unique_ptr<char, Freer>;

int report(aav_status) {
  std::cerr << "aav: " << aav_last_error() << "\n";
  return kExitData;
}

bool write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "aav: cannot write " << path << "\n";
    return false;
  }
  return true;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct ServeArgs {
  std::optional<int> port;
  std::optional<std::int64_t> tick_ms;
  std::string address = "0.0.0.0";
  std::string log_dir;
  int threads = 2;
};

int run_serve(const ServeArgs& a) {
  json opts{{"address", a.address}, {"threads", a.threads}, {"handle_signals", true}};
  if (a.port) opts["port"] = *a.port;
  if (a.tick_ms) opts["tick_ms"] = *a.tick_ms;
  if (!a.log_dir.empty()) opts["log_dir"] = a.log_dir;
  aav_server* server = nullptr;
  if (auto st = aav_server_create(opts.dump().c_str(), &server); st != AAV_OK) return report(st);
  std::unique_ptr<aav_server, decltype(&aav_server_destroy)> guard(server, &aav_server_destroy);
  std::uint16_t port = 0;
  if (auto st = aav_server_start(server, &port); st != AAV_OK) return report(st);
  std::cout << "listening on " << a.address << ":" << port << std::endl;
  aav_server_wait(server);
  if (auto st = aav_server_stop(server); st != AAV_OK) return report(st);
  return 0;
}

struct ReplayArgs {
  std::string log;
  std::optional<std::int64_t> until;
  std::string out;
};

int run_replay(const ReplayArgs& a) {
  char* snap = nullptr;
  char* summary = nullptr;
  const bool to_stdout = a.out.empty() || a.out == "-";
  const auto st = aav_replay_file(a.log.c_str(), a.until ? 1 : 0, a.until.value_or(0),
                                  to_stdout ? nullptr : a.out.c_str(), to_stdout ? &snap : nullptr, &summary);
  if (st != AAV_OK) return report(st);
  CString snap_guard(snap), summary_guard(summary);
  if (to_stdout) {
    std::cout << snap << "\n";
    std::cerr << summary;
  } else {
    std::cout << summary;
  }
  return 0;
}

struct RenderArgs {
  std::string snapshot;
  std::string style = "heatmap";
  std::string stat = "short_term";
  std::vector<double> levels;
  std::string border_style = "bar";
  std::string axis = "x";
  std::string background;
  std::string out;
};

int run_render(const RenderArgs& a) {
  json opts{{"style", a.style}, {"stat", a.stat}, {"border_style", a.border_style}, {"axis", a.axis}};
  if (!a.levels.empty()) opts["levels"] = a.levels;
  if (!a.background.empty()) opts["background"] = a.background;
  char* svg = nullptr;
  if (auto st = aav_render_svg(a.snapshot.c_str(), opts.dump().c_str(), &svg); st != AAV_OK) return report(st);
  CString guard(svg);
  return write_output(a.out, svg) ? 0 : kExitData;
}

struct SimulateArgs {
  std::string spec;
  std::string header;
  std::optional<std::uint64_t> seed;
  std::optional<int> fixations;
  std::optional<double> duration_mean;
  std::optional<double> duration_sd;
  std::vector<std::string> hotspots;
  std::optional<std::string> source;
  std::optional<double> radius;
  std::optional<double> width, height, cell;
  std::optional<std::int64_t> tick_ms;
  std::optional<std::string> trigger_mode;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  json spec = json::object();
  if (!a.spec.empty()) {
    const auto text = read_file(a.spec);
    if (!text) {
      std::cerr << "aav: cannot read " << a.spec << "\n";
      return kExitData;
    }
    try {
      spec = json::parse(*text);
    } catch (const json::exception& e) {
      std::cerr << "aav: " << a.spec << ": " << e.what() << "\n";
      return kExitData;
    }
  }
  json header = json::object();
  if (spec.is_object() && spec.contains("header")) header = spec.at("header");
  if (!a.header.empty()) {
    const auto text = read_file(a.header);
    if (!text) {
      std::cerr << "aav: cannot read " << a.header << "\n";
      return kExitData;
    }
    try {
      header = json::parse(*text);
    } catch (const json::exception& e) {
      std::cerr << "aav: " << a.header << ": " << e.what() << "\n";
      return kExitData;
    }
  }
  if (!spec.is_object() || !header.is_object()) {
    std::cerr << "aav: spec and header must be JSON objects\n";
    return kExitData;
  }
  if (a.seed) spec["seed"] = *a.seed;
  if (a.fixations) spec["fixation_count"] = *a.fixations;
  if (a.duration_mean) spec["duration_mean_ms"] = *a.duration_mean;
  if (a.duration_sd) spec["duration_sd_ms"] = *a.duration_sd;
  if (a.source) spec["source"] = *a.source;
  if (a.radius) spec["radius_px"] = *a.radius;
  if (!a.hotspots.empty()) {
    json targets = json::array();
    for (const auto& h : a.hotspots) {
      std::vector<double> v;
      std::stringstream ss(h);
      std::string part;
      while (std::getline(ss, part, ',')) {
        try {
          v.push_back(std::stod(part));
        } catch (const std::exception&) {
          v.clear();
          break;
        }
      }
      if (v.size() != 4 && v.size() != 5) {
        std::cerr << "aav: --hotspot expects x,y,w,h[,weight], got '" << h << "'\n";
        return kExitUsage;
      }
      targets.push_back({{"x", v[0]}, {"y", v[1]}, {"w", v[2]}, {"h", v[3]}, {"weight", v.size() == 5 ? v[4] : 1.0}});
    }
    spec["targets"] = targets;
  }
  spec.erase("header");
  if (a.width || a.height || a.cell) {
    json& grid = header["grid"];
    if (!grid.is_object()) grid = json::object();
    if (a.width) grid["width_px"] = *a.width;
    if (a.height) grid["height_px"] = *a.height;
    if (a.cell) grid["cell_px"] = *a.cell;
  }
  if (a.tick_ms) {
    if (!header["params"].is_object()) header["params"] = json::object();
    header["params"]["tick_ms"] = *a.tick_ms;
  }
  if (a.trigger_mode) header["trigger_mode"] = *a.trigger_mode;

  char* log = nullptr;
  if (auto st = aav_simulate(spec.dump().c_str(), header.dump().c_str(), &log); st != AAV_OK) return report(st);
  CString guard(log);
  return write_output(a.out, log) ? 0 : kExitData;
}

int run_stats(const std::string& log, std::size_t top) {
  char* text = nullptr;
  if (auto st = aav_stats_file(log.c_str(), top, &text); st != AAV_OK) return report(st);
  CString guard(text);
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attention-aware visualization engine"};
  app.set_version_flag("--version", std::string(aav_version()));
  app.require_subcommand(1);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the WebSocket session server");
  serve_cmd->add_option("--port", serve.port, "Listen port (default: AAV_PORT or 8080; 0 picks a free port)")
      ->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--tick-ms", serve.tick_ms, "Override every session's tick period")
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--address", serve.address, "Listen address");
  serve_cmd->add_option("--log-dir", serve.log_dir, "Write each finished session's log here");
  serve_cmd->add_option("--threads", serve.threads, "I/O threads")->check(CLI::Range(1, 64));

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a session log and write the final snapshot");
  replay_cmd->add_option("log", replay.log, "Session log (.aav.jsonl)")->required();
  replay_cmd->add_option("--until", replay.until, "Stop at this session time in ms");
  replay_cmd->add_option("-o,--out", replay.out, "Snapshot path (default: stdout)");

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "Render a grid snapshot as SVG");
  render_cmd->add_option("snapshot", render.snapshot, "Snapshot (.aav.snap)")->required();
  render_cmd->add_option("--style", render.style, "Overlay style")
      ->check(CLI::IsMember({"heatmap", "contour", "border"}));
  render_cmd->add_option("--stat", render.stat, "Attention statistic")
      ->check(CLI::IsMember({"short_term", "cumulative"}));
  render_cmd->add_option("--levels", render.levels, "Contour levels in (0, 1)")->delimiter(',');
  render_cmd->add_option("--border-style", render.border_style, "Border chart style")
      ->check(CLI::IsMember({"bar", "area", "linear_heatmap"}));
  render_cmd->add_option("--axis", render.axis, "Border chart axis")->check(CLI::IsMember({"x", "y"}));
  render_cmd->add_option("--background", render.background, "Image drawn under the overlay");
  render_cmd->add_option("-o,--out", render.out, "Output path (default: stdout)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic scanpath session log");
  sim_cmd->add_option("--spec", sim.spec, "Scanpath spec (JSON)");
  sim_cmd->add_option("--header", sim.header, "Session header (JSON)");
  sim_cmd->add_option("--seed", sim.seed, "Random seed");
  sim_cmd->add_option("--fixations", sim.fixations, "Number of fixations")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--duration-mean", sim.duration_mean, "Mean fixation duration in ms");
  sim_cmd->add_option("--duration-sd", sim.duration_sd, "Fixation duration standard deviation in ms");
  sim_cmd->add_option("--hotspot", sim.hotspots, "Target region x,y,w,h[,weight] (repeatable)");
  sim_cmd->add_option("--source", sim.source, "Attention source")
      ->check(CLI::IsMember({"gaze", "pointer", "touch", "head"}));
  sim_cmd->add_option("--radius", sim.radius, "Attention radius in px");
  sim_cmd->add_option("--width", sim.width, "Mount width in px");
  sim_cmd->add_option("--height", sim.height, "Mount height in px");
  sim_cmd->add_option("--cell", sim.cell, "Grid cell size in px");
  sim_cmd->add_option("--tick-ms", sim.tick_ms, "Tick period in ms")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--trigger-mode", sim.trigger_mode, "Trigger mode")
      ->check(CLI::IsMember({"always_on", "explicit", "implicit"}));
  sim_cmd->add_option("-o,--out", sim.out, "Log path (default: stdout)");

  std::string stats_log;
  std::size_t stats_top = 5;
  auto* stats_cmd = app.add_subcommand("stats", "Summarize a session log");
  stats_cmd->add_option("log", stats_log, "Session log (.aav.jsonl)")->required();
  stats_cmd->add_option("--top", stats_top, "Number of top targets to list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (*serve_cmd) return run_serve(serve);
  if (*replay_cmd) return run_replay(replay);
  if (*render_cmd) return run_render(render);
  if (*sim_cmd) return run_simulate(sim);
  if (*stats_cmd) return run_stats(stats_log, stats_top);
  return kExitUsage;
}
