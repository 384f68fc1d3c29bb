#include "aav/revis.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "aav/error.hpp"

namespace aav {

Colormap::Colormap(std::vector<Rgb> stops) : stops_(std::move(stops)) {
  if (stops_.empty()) fail(ErrorCode::InvalidArgument, "colormap needs at least one stop");
}

Colormap Colormap::sequential() {
  return Colormap({{68, 1, 84},
                   {71, 45, 123},
                   {59, 82, 139},
                   {44, 114, 142},
                   {33, 145, 140},
                   {40, 174, 128},
                   {94, 201, 98},
                   {173, 220, 48},
                   {253, 231, 37}});
}

Rgb Colormap::operator()(double t) const {
  if (stops_.size() == 1) return stops_.front();
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * static_cast<double>(stops_.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), stops_.size() - 2);
  const double f = pos - static_cast<double>(i);
  const Rgb& a = stops_[i];
  const Rgb& b = stops_[i + 1];
  return {a.r + (b.r - a.r) * f, a.g + (b.g - a.g) * f, a.b + (b.b - a.b) * f};
}

std::vector<Rgb> heatmap(std::span<const double> values, const Colormap& cmap) {
  const auto norm = normalize(values);
  std::vector<Rgb> out;
  out.reserve(norm.size());
  for (double v : norm) out.push_back(cmap(v));
  return out;
}

std::string_view to_string(Stat s) { return s == Stat::ShortTerm ? "short_term" : "cumulative"; }

Stat stat_from_string(std::string_view s) {
  if (s == "short_term" || s == "short-term") return Stat::ShortTerm;
  if (s == "cumulative") return Stat::Cumulative;
  fail(ErrorCode::InvalidArgument, "unknown statistic '" + std::string(s) + "'");
}

Field grid_field(const AttentionGrid& grid, Stat stat) { return map_field(grid.config(), grid.map(), stat); }

Field map_field(const GridConfig& config, const AttentionMap& map, Stat stat) {
  if (map.size() != config.cell_count()) fail(ErrorCode::InvalidArgument, "attention map does not match the grid");
  Field f;
  f.rows = config.rows();
  f.cols = config.cols();
  f.values = stat == Stat::ShortTerm ? map.fused_short_term() : map.fused_cumulative();
  return f;
}

ContourLattice contour_lattice(const GridConfig& config) {
  ContourLattice lat;
  lat.xs.push_back(0.0);
  for (int c = 0; c < config.cols(); ++c) {
    const Rect r = cell_rect(config, {0, c});
    lat.xs.push_back((r.x0 + r.x1) / 2.0);
  }
  lat.xs.push_back(config.width_px);
  lat.ys.push_back(0.0);
  for (int row = 0; row < config.rows(); ++row) {
    const Rect r = cell_rect(config, {row, 0});
    lat.ys.push_back((r.y0 + r.y1) / 2.0);
  }
  lat.ys.push_back(config.height_px);
  return lat;
}

namespace {

class PaddedField {
 public:
  explicit PaddedField(const Field& f) : rows_(f.rows + 2), cols_(f.cols + 2), v_(rows_ * cols_, 0.0) {
    for (int r = 0; r < f.rows; ++r)
      for (int c = 0; c < f.cols; ++c) v_[idx(r + 1, c + 1)] = f.at(r, c);
  }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double at(int r, int c) const { return v_[idx(r, c)]; }

 private:
  std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * cols_ + c; }
  int rows_, cols_;
  std::vector<double> v_;
};

struct Node {
  int r, c;
};

// Edge ids: horizontal edge from (r, c) to (r, c+1) and vertical edge from
// (r, c) to (r+1, c).
long long edge_id(Node a, Node b, int cols) {
  const Node lo = (a.r < b.r || (a.r == b.r && a.c < b.c)) ? a : b;
  const long long base = 2LL * (static_cast<long long>(lo.r) * cols + lo.c);
  return a.r == b.r ? base : base + 1;
}

}  // namespace

std::vector<ContourRing> contours(const Field& field, const GridConfig& config,
                                  std::span<const double> iso_levels) {
  if (field.rows != config.rows() || field.cols != config.cols() ||
      field.values.size() != static_cast<std::size_t>(field.rows) * field.cols)
    fail(ErrorCode::InvalidArgument, "field does not match grid configuration");
  const PaddedField pf(field);
  const ContourLattice lat = contour_lattice(config);
  std::vector<ContourRing> rings;

  for (double level : iso_levels) {
    if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::InvalidArgument, "iso levels must lie in (0, 1)");
    auto inside = [&](Node n) { return pf.at(n.r, n.c) > level; };
    auto crossing = [&](Node a, Node b) {
      // Interpolate from the lexicographically smaller node for a canonical point.
      if (b.r < a.r || (b.r == a.r && b.c < a.c)) std::swap(a, b);
      const double va = pf.at(a.r, a.c), vb = pf.at(b.r, b.c);
      const double t = (level - va) / (vb - va);
      const Point2 pa{lat.xs[a.c], lat.ys[a.r]}, pb{lat.xs[b.c], lat.ys[b.r]};
      return Point2{pa.x + (pb.x - pa.x) * t, pa.y + (pb.y - pa.y) * t};
    };

    // start edge -> end edge; each crossing edge starts exactly one segment.
    std::unordered_map<long long, long long> next;
    std::unordered_map<long long, Point2> point;
    std::vector<long long> order;

    for (int r = 0; r + 1 < pf.rows(); ++r) {
      for (int c = 0; c + 1 < pf.cols(); ++c) {
        // Clockwise on screen: top-left, top-right, bottom-right, bottom-left.
        const Node corner[4] = {{r, c}, {r, c + 1}, {r + 1, c + 1}, {r + 1, c}};
        struct Crossing {
          long long id;
          bool exit;
        };
        Crossing xs[4];
        int n = 0;
        for (int k = 0; k < 4; ++k) {
          const Node p = corner[k], q = corner[(k + 1) % 4];
          if (inside(p) == inside(q)) continue;
          const long long id = edge_id(p, q, pf.cols());
          if (!point.contains(id)) point.emplace(id, crossing(p, q));
          xs[n++] = {id, inside(p)};
        }
        if (n == 0) continue;
        bool center_inside = false;
        if (n == 4) {
          double avg = 0.0;
          for (const Node& k : corner) avg += pf.at(k.r, k.c);
          center_inside = avg / 4.0 > level;
        }
        for (int k = 0; k < n; ++k) {
          if (!xs[k].exit) continue;
          const int to = (n == 4 && center_inside) ? (k + 1) % n : (k + n - 1) % n;
          next.emplace(xs[k].id, xs[to].id);
          order.push_back(xs[k].id);
        }
      }
    }

    std::unordered_map<long long, bool> used;
    for (long long start : order) {
      if (used[start]) continue;
      ContourRing ring;
      ring.iso_level = level;
      long long e = start;
      do {
        used[e] = true;
        ring.points.push_back(point.at(e));
        const auto it = next.find(e);
        if (it == next.end()) {
          ring.closed = false;
          break;
        }
        e = it->second;
      } while (e != start);
      rings.push_back(std::move(ring));
    }
  }
  return rings;
}

std::string_view to_string(BorderStyle s) {
  switch (s) {
    case BorderStyle::Bar: return "bar";
    case BorderStyle::Area: return "area";
    case BorderStyle::LinearHeatmap: return "linear_heatmap";
  }
  return "bar";
}

BorderStyle border_style_from_string(std::string_view s) {
  if (s == "bar") return BorderStyle::Bar;
  if (s == "area") return BorderStyle::Area;
  if (s == "linear_heatmap" || s == "linear-heatmap") return BorderStyle::LinearHeatmap;
  fail(ErrorCode::InvalidArgument, "unknown border style '" + std::string(s) + "'");
}

BorderMarginal border_marginals(const Field& field, Axis axis, BorderStyle style) {
  BorderMarginal m;
  m.axis = axis;
  m.style = style;
  m.sums.assign(static_cast<std::size_t>(axis == Axis::X ? field.cols : field.rows), 0.0);
  for (int r = 0; r < field.rows; ++r)
    for (int c = 0; c < field.cols; ++c)
      m.sums[static_cast<std::size_t>(axis == Axis::X ? c : r)] += field.at(r, c);
  m.values = normalize(m.sums);
  return m;
}

std::vector<MeshCellFilter> mesh_filters(std::span<const double> short_term_norm, const MeshParams& params) {
  std::vector<MeshCellFilter> out;
  out.reserve(short_term_norm.size());
  for (double s : short_term_norm) {
    s = std::clamp(s, 0.0, 1.0);
    out.push_back({1.0 - s, params.blur_px * s, std::clamp(params.darken_gain * s, 0.0, 1.0)});
  }
  return out;
}

std::string_view to_string(MarkMode m) {
  switch (m) {
    case MarkMode::Normal: return "normal";
    case MarkMode::Emphasis: return "emphasis";
    case MarkMode::DeEmphasis: return "deemphasis";
    case MarkMode::Heatmap: return "heatmap";
  }
  return "normal";
}

std::vector<MarkStyle> mark_styles(std::span<const double> short_term_norm,
                                   std::span<const double> cumulative_norm, std::span<const Flag> flags,
                                   const Colormap& cmap, const StyleOptions& options) {
  const std::size_t n = short_term_norm.size();
  if (cumulative_norm.size() != n || (!flags.empty() && flags.size() != n))
    fail(ErrorCode::InvalidArgument, "mark style inputs differ in length");
  std::vector<MarkStyle> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Flag flag = flags.empty() ? Flag::None : flags[i];
    MarkStyle& s = out[i];
    s.color = options.base;
    if (flag == Flag::Emphasize) {
      s.mode = MarkMode::Emphasis;
      s.color = options.emphasis;
    } else if (flag == Flag::DeEmphasize) {
      s.mode = MarkMode::DeEmphasis;
      s.saturation_factor = 1.0 - std::clamp(short_term_norm[i], 0.0, 1.0);
    } else if (options.heatmap) {
      s.mode = MarkMode::Heatmap;
      s.color = cmap(cumulative_norm[i]);
    }
  }
  return out;
}

}  // namespace aav
