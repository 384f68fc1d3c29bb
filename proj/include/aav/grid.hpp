#pragma once

#include <cstddef>
#include <vector>

#include "aav/model.hpp"

namespace aav {

/// Regular lattice of square cells over a mounted rectangle. The last
/// column/row is clipped to the mount when the size is not a multiple of
/// `cell_px`.
struct GridConfig {
  double width_px = 0.0;
  double height_px = 0.0;
  double cell_px = 32.0;

  void validate() const;
  int cols() const;
  int rows() const;
  std::size_t cell_count() const {
    return static_cast<std::size_t>(cols()) * static_cast<std::size_t>(rows());
  }

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct Cell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

Rect cell_rect(const GridConfig& config, Cell cell);

/// Cells whose closed rectangle meets the closed disk, in row-major order.
std::vector<Cell> cells_intersecting_circle(const GridConfig& config, Point2 center,
                                            double radius_px);

class AttentionGrid {
 public:
  AttentionGrid() = default;
  explicit AttentionGrid(const GridConfig& config);

  const GridConfig& config() const { return config_; }
  const AttentionMap& map() const { return map_; }
  AttentionMap& map() { return map_; }

  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(config_.cols()) +
           static_cast<std::size_t>(c.col);
  }
  Cell cell_at(std::size_t index) const;

  friend bool operator==(const AttentionGrid&, const AttentionGrid&) = default;

 private:
  GridConfig config_;
  AttentionMap map_;
};

/// Resolves the sample's circle against the lattice and ticks the grid once.
/// The screen-center sentinel maps to the mount center. Passing no sample
/// ticks a decay-only step.
void apply_sample(AttentionGrid& grid, const AttentionSample* sample, const ModelParams& params);

/// Fraction of cells with any cumulative attention (over all sources).
double coverage(const AttentionGrid& grid);

}  // namespace aav
