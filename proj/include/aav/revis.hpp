#pragma once

// Revisualization payloads computed from attention map snapshots: colour
// heatmaps, iso-contours, border marginals, per-cell filter parameters for
// the mesh style and per-mark styles for data-aware scenes.

#include <span>
#include <string_view>
#include <vector>

#include "aav/grid.hpp"
#include "aav/triggers.hpp"

namespace aav {

struct Rgb {
  double r = 0.0, g = 0.0, b = 0.0;  // each in [0, 255]
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Piecewise-linear colour ramp over [0, 1] with evenly spaced stops.
class Colormap {
 public:
  explicit Colormap(std::vector<Rgb> stops);

  /// Sequential perceptually ordered ramp (dark purple through yellow).
  static Colormap sequential();

  Rgb operator()(double t) const;
  Rgb zero() const { return stops_.front(); }
  const std::vector<Rgb>& stops() const { return stops_; }

 private:
  std::vector<Rgb> stops_;
};

std::vector<Rgb> heatmap(std::span<const double> values, const Colormap& cmap);

/// Row-major scalar field on a grid's cells.
struct Field {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  double at(int r, int c) const {
    return values[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c)];
  }
};

enum class Stat { ShortTerm, Cumulative };
std::string_view to_string(Stat s);
Stat stat_from_string(std::string_view s);

/// Fused (max over sources) field of the grid's chosen statistic.
Field grid_field(const AttentionGrid& grid, Stat stat);
Field map_field(const GridConfig& config, const AttentionMap& map, Stat stat);

struct ContourRing {
  double iso_level = 0.0;
  std::vector<Point2> points;
  bool closed = true;
};

/// Lattice node positions used for contouring: node (r, c) sits at the
/// centre of cell (r, c). The field is padded by a ring of zero-valued nodes
/// placed on the mount border so every iso-line closes.
struct ContourLattice {
  std::vector<double> xs;  // cols + 2 entries
  std::vector<double> ys;  // rows + 2 entries
};

ContourLattice contour_lattice(const GridConfig& config);

/// Marching squares with linear edge interpolation; ambiguous saddle cells
/// are resolved by the average of the four corners. A node counts as inside
/// when its value is strictly above the level. Rings keep inside regions on
/// their left in a y-down pixel frame.
std::vector<ContourRing> contours(const Field& normalized, const GridConfig& config,
                                  std::span<const double> iso_levels);

enum class Axis { X, Y };
enum class BorderStyle { Bar, Area, LinearHeatmap };
std::string_view to_string(BorderStyle s);
BorderStyle border_style_from_string(std::string_view s);

struct BorderMarginal {
  Axis axis = Axis::X;
  std::vector<double> values;  // normalized
  std::vector<double> sums;    // before normalization
  BorderStyle style = BorderStyle::Bar;
};

/// X marginal: one entry per column summing over rows; Y: one per row.
BorderMarginal border_marginals(const Field& field, Axis axis, BorderStyle style = BorderStyle::Bar);

struct MeshParams {
  double darken_gain = 0.6;
  double blur_px = 3.0;
};

struct MeshCellFilter {
  double saturation = 1.0;
  double blur_px = 0.0;
  double darken = 0.0;
  friend bool operator==(const MeshCellFilter&, const MeshCellFilter&) = default;
};

/// Seen areas are de-emphasized: saturation 1 - s, darken k*s, blur b*s.
std::vector<MeshCellFilter> mesh_filters(std::span<const double> short_term_norm,
                                         const MeshParams& params = {});

enum class MarkMode { Normal, Emphasis, DeEmphasis, Heatmap };
std::string_view to_string(MarkMode m);

struct MarkStyle {
  MarkMode mode = MarkMode::Normal;
  Rgb color{255.0, 255.0, 255.0};
  double saturation_factor = 1.0;
  friend bool operator==(const MarkStyle&, const MarkStyle&) = default;
};

struct StyleOptions {
  bool heatmap = false;  // colour every unflagged mark by cumulative attention
  Rgb emphasis{255.0, 230.0, 0.0};
  Rgb base{255.0, 255.0, 255.0};
};

/// Flags take precedence; unflagged marks use the heatmap when enabled and
/// the identity style otherwise.
std::vector<MarkStyle> mark_styles(std::span<const double> short_term_norm,
                                   std::span<const double> cumulative_norm, std::span<const Flag> flags,
                                   const Colormap& cmap, const StyleOptions& options = {});

}  // namespace aav
