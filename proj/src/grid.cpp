#include "aav/grid.hpp"

#include <algorithm>
#include <cmath>

#include "aav/error.hpp"

namespace aav {

void GridConfig::validate() const {
  if (!(width_px > 0.0) || !(height_px > 0.0))
    fail(ErrorCode::InvalidArgument, "grid width/height must be positive");
  if (!(cell_px > 0.0)) fail(ErrorCode::InvalidArgument, "cell_px must be positive");
  if (cell_px > std::min(width_px, height_px))
    fail(ErrorCode::InvalidArgument, "cell_px must not exceed the smaller mount dimension");
}

int GridConfig::cols() const { return static_cast<int>(std::ceil(width_px / cell_px)); }
int GridConfig::rows() const { return static_cast<int>(std::ceil(height_px / cell_px)); }

Rect cell_rect(const GridConfig& config, Cell cell) {
  Rect r;
  r.x0 = cell.col * config.cell_px;
  r.y0 = cell.row * config.cell_px;
  r.x1 = std::min(config.width_px, (cell.col + 1) * config.cell_px);
  r.y1 = std::min(config.height_px, (cell.row + 1) * config.cell_px);
  return r;
}

namespace {

// Indices of the lattice intervals [i*cell, min((i+1)*cell, extent)] that
// meet the closed interval [lo, hi]. Returns an empty range as (1, 0).
std::pair<int, int> interval_span(double lo, double hi, double cell, double extent, int count) {
  if (hi < 0.0 || lo > extent) return {1, 0};
  int first = static_cast<int>(std::ceil(lo / cell - 1.0));
  int last = static_cast<int>(std::floor(hi / cell));
  first = std::max(first, 0);
  last = std::min(last, count - 1);
  return {first, last};
}

}  // namespace

std::vector<Cell> cells_intersecting_circle(const GridConfig& config, Point2 center,
                                            double radius_px) {
  std::vector<Cell> out;
  if (!(radius_px >= 0.0)) return out;
  const int rows = config.rows();
  const int cols = config.cols();
  const auto [row_first, row_last] =
      interval_span(center.y - radius_px, center.y + radius_px, config.cell_px, config.height_px, rows);
  for (int r = row_first; r <= row_last; ++r) {
    const double y0 = r * config.cell_px;
    const double y1 = std::min(config.height_px, (r + 1) * config.cell_px);
    const double dy = center.y < y0 ? y0 - center.y : (center.y > y1 ? center.y - y1 : 0.0);
    if (dy > radius_px) continue;
    // Half-width of the disk's chord at the row's nearest height.
    const double half = std::sqrt(std::max(0.0, radius_px * radius_px - dy * dy));
    const auto [col_first, col_last] =
        interval_span(center.x - half, center.x + half, config.cell_px, config.width_px, cols);
    for (int c = col_first; c <= col_last; ++c) out.push_back({r, c});
  }
  return out;
}

AttentionGrid::AttentionGrid(const GridConfig& config) : config_(config) {
  config_.validate();
  map_ = AttentionMap(config_.cell_count());
}

Cell AttentionGrid::cell_at(std::size_t index) const {
  const auto cols = static_cast<std::size_t>(config_.cols());
  return {static_cast<int>(index / cols), static_cast<int>(index % cols)};
}

void apply_sample(AttentionGrid& grid, const AttentionSample* sample, const ModelParams& params) {
  std::vector<std::size_t> hit;
  std::optional<Source> source;
  if (sample) {
    const auto& cfg = grid.config();
    const Point2 center = sample->position.value_or(Point2{cfg.width_px / 2.0, cfg.height_px / 2.0});
    const double radius = sample->radius_px.value_or(params.default_radius_px);
    if (radius < 0.0) fail(ErrorCode::InvalidArgument, "sample radius must be non-negative");
    for (Cell c : cells_intersecting_circle(cfg, center, radius)) hit.push_back(grid.index(c));
    source = sample->source;
  }
  step_session(grid.map(), hit, source, params);
}

double coverage(const AttentionGrid& grid) {
  const auto cumulative = grid.map().fused_cumulative();
  if (cumulative.empty()) return 0.0;
  const auto touched = std::count_if(cumulative.begin(), cumulative.end(),
                                     [](double v) { return v > 0.0; });
  return static_cast<double>(touched) / static_cast<double>(cumulative.size());
}

}  // namespace aav
