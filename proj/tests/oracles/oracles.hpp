#pragma once

// Reference implementations used only by tests. They favour directness over
// speed and share no code with the library beyond its plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <vector>

#include "aav/grid.hpp"
#include "aav/marks.hpp"
#include "aav/model.hpp"
#include "aav/revis.hpp"

namespace oracle {

// Disk / rectangle ----------------------------------------------------------

inline std::set<aav::Cell> disk_cells(const aav::GridConfig& cfg, aav::Point2 c, double r) {
  std::set<aav::Cell> out;
  const int cols = static_cast<int>(std::ceil(cfg.width_px / cfg.cell_px));
  const int rows = static_cast<int>(std::ceil(cfg.height_px / cfg.cell_px));
  for (int row = 0; row < rows; ++row) {
    for (int col = 0; col < cols; ++col) {
      const double x0 = col * cfg.cell_px, y0 = row * cfg.cell_px;
      const double x1 = std::min(cfg.width_px, x0 + cfg.cell_px), y1 = std::min(cfg.height_px, y0 + cfg.cell_px);
      const double qx = std::clamp(c.x, x0, x1), qy = std::clamp(c.y, y0, y1);
      if (std::hypot(c.x - qx, c.y - qy) <= r) out.insert({row, col});
    }
  }
  return out;
}

// Scalar model ---------------------------------------------------------------

struct Scalar {
  double cum = 0.0;
  double st = 0.0;
};

/// Replays per-tick hit sets over `n` targets with textbook formulas.
inline std::vector<Scalar> scalar_replay(std::size_t n, const std::vector<std::vector<std::size_t>>& hits,
                                         double dt, double gain, double half_life, double cap) {
  std::vector<Scalar> s(n);
  for (const auto& tick_hits : hits) {
    std::vector<bool> hit(n, false);
    for (auto i : tick_hits) hit[i] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (hit[i]) {
        s[i].cum += dt;
        s[i].st = std::min(cap, s[i].st + gain * dt);
      } else {
        s[i].st = s[i].st * std::pow(0.5, dt / half_life);
      }
    }
  }
  return s;
}

// Ray casting ----------------------------------------------------------------

inline aav::Vec3 normalized(aav::Vec3 v) {
  const double l = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  return {v.x / l, v.y / l, v.z / l};
}

inline aav::Vec3 crossp(aav::Vec3 a, aav::Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double dotp(aav::Vec3 a, aav::Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

struct CameraFrame {
  aav::Vec3 f, r, u;
  double tan_half, aspect;
};

inline CameraFrame camera_frame(const aav::Camera& cam) {
  CameraFrame fr;
  fr.f = normalized(cam.forward);
  fr.r = normalized(crossp(fr.f, cam.up));
  fr.u = crossp(fr.r, fr.f);
  fr.tan_half = std::tan(cam.fov_y_deg * 3.14159265358979323846 / 360.0);
  fr.aspect = static_cast<double>(cam.viewport_width) / cam.viewport_height;
  return fr;
}

/// Nearest front-facing hit through each pixel centre, by Moller-Trumbore.
inline std::vector<std::optional<aav::FaceKey>> ray_cast(const aav::Scene& scene, const aav::Camera& cam, int w,
                                                         int h) {
  const auto fr = camera_frame(cam);
  std::vector<std::optional<aav::FaceKey>> out(static_cast<std::size_t>(w) * h);
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      const double nx = (px + 0.5) / w * 2.0 - 1.0;
      const double ny = 1.0 - (py + 0.5) / h * 2.0;
      const aav::Vec3 dir = fr.f + fr.r * (nx * fr.tan_half * fr.aspect) + fr.u * (ny * fr.tan_half);
      double best = std::numeric_limits<double>::infinity();
      std::optional<aav::FaceKey> hit;
      for (const auto& obj : scene) {
        for (std::size_t fi = 0; fi < obj.faces.size(); ++fi) {
          const auto& face = obj.faces[fi];
          const aav::Vec3 a = obj.vertices[face.a], b = obj.vertices[face.b], c = obj.vertices[face.c];
          const aav::Vec3 e1 = b - a, e2 = c - a;
          if (dotp(crossp(e1, e2), dir) >= 0.0) continue;  // back-facing or edge-on
          const aav::Vec3 p = crossp(dir, e2);
          const double det = dotp(e1, p);
          if (std::abs(det) < 1e-15) continue;
          const aav::Vec3 s = cam.position - a;
          const double bu = dotp(s, p) / det;
          if (bu < 0.0 || bu > 1.0) continue;
          const aav::Vec3 q = crossp(s, e1);
          const double bv = dotp(dir, q) / det;
          if (bv < 0.0 || bu + bv > 1.0) continue;
          const double t = dotp(e2, q) / det;  // dir has unit forward component: t is view depth
          if (t < cam.near_plane || t > cam.far_plane) continue;
          if (t < best) {
            best = t;
            hit = aav::FaceKey{obj.object_id, static_cast<int>(fi)};
          }
        }
      }
      out[static_cast<std::size_t>(py) * w + px] = hit;
    }
  }
  return out;
}

/// Screen position (pixels of a w x h buffer) of a world point in front of
/// the camera.
inline aav::Point2 project(const aav::Camera& cam, aav::Vec3 p, int w, int h) {
  const auto fr = camera_frame(cam);
  const aav::Vec3 d = p - cam.position;
  const double z = dotp(d, fr.f);
  const double nx = dotp(d, fr.r) / (z * fr.tan_half * fr.aspect);
  const double ny = dotp(d, fr.u) / (z * fr.tan_half);
  return {(nx + 1.0) / 2.0 * w, (1.0 - ny) / 2.0 * h};
}

inline double segment_distance(aav::Point2 p, aav::Point2 a, aav::Point2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

/// Pixels whose centre lies within `margin` px of any projected triangle edge.
/// All vertices must be in front of the camera.
inline std::vector<bool> edge_pixels(const aav::Scene& scene, const aav::Camera& cam, int w, int h,
                                     double margin = 1.0) {
  std::vector<bool> edge(static_cast<std::size_t>(w) * h, false);
  for (const auto& obj : scene) {
    for (const auto& face : obj.faces) {
      const aav::Point2 p[3] = {project(cam, obj.vertices[face.a], w, h), project(cam, obj.vertices[face.b], w, h),
                                project(cam, obj.vertices[face.c], w, h)};
      for (int e = 0; e < 3; ++e) {
        const aav::Point2 a = p[e], b = p[(e + 1) % 3];
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - margin - 1)));
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + margin + 1)));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - margin - 1)));
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + margin + 1)));
        for (int y = y0; y <= y1; ++y)
          for (int x = x0; x <= x1; ++x)
            if (segment_distance({x + 0.5, y + 0.5}, a, b) <= margin) edge[static_cast<std::size_t>(y) * w + x] = true;
      }
    }
  }
  return edge;
}

// Contours -------------------------------------------------------------------

/// Even-odd crossing test.
inline bool inside(const std::vector<aav::Point2>& poly, aav::Point2 p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

inline int ring_parity(const std::vector<aav::ContourRing>& rings, double level, aav::Point2 p) {
  int n = 0;
  for (const auto& r : rings)
    if (r.iso_level == level && inside(r.points, p)) ++n;
  return n;
}

/// Padded lattice: node (i, j) for i in [0, rows + 2), j in [0, cols + 2);
/// the outer ring of nodes is zero and sits on the mount border.
struct Lattice {
  std::vector<double> xs, ys;
  std::vector<double> v;  // row-major (rows + 2) x (cols + 2)
  int nx = 0, ny = 0;
  double at(int i, int j) const { return v[static_cast<std::size_t>(i) * nx + j]; }
};

inline Lattice lattice(const aav::Field& f, const aav::GridConfig& cfg) {
  Lattice l;
  l.nx = f.cols + 2;
  l.ny = f.rows + 2;
  l.xs.push_back(0.0);
  for (int c = 0; c < f.cols; ++c) l.xs.push_back((c * cfg.cell_px + std::min(cfg.width_px, (c + 1) * cfg.cell_px)) / 2);
  l.xs.push_back(cfg.width_px);
  l.ys.push_back(0.0);
  for (int r = 0; r < f.rows; ++r)
    l.ys.push_back((r * cfg.cell_px + std::min(cfg.height_px, (r + 1) * cfg.cell_px)) / 2);
  l.ys.push_back(cfg.height_px);
  l.v.assign(static_cast<std::size_t>(l.nx) * l.ny, 0.0);
  for (int r = 0; r < f.rows; ++r)
    for (int c = 0; c < f.cols; ++c) l.v[static_cast<std::size_t>(r + 1) * l.nx + (c + 1)] = f.at(r, c);
  return l;
}

/// Bilinear interpolation of the padded lattice at a mount position.
inline double bilinear(const Lattice& l, aav::Point2 p) {
  const auto ix = std::upper_bound(l.xs.begin(), l.xs.end(), p.x) - l.xs.begin() - 1;
  const auto iy = std::upper_bound(l.ys.begin(), l.ys.end(), p.y) - l.ys.begin() - 1;
  const int j = std::clamp(static_cast<int>(ix), 0, l.nx - 2);
  const int i = std::clamp(static_cast<int>(iy), 0, l.ny - 2);
  const double tx = (p.x - l.xs[j]) / (l.xs[j + 1] - l.xs[j]);
  const double ty = (p.y - l.ys[i]) / (l.ys[i + 1] - l.ys[i]);
  const double top = l.at(i, j) * (1 - tx) + l.at(i, j + 1) * tx;
  const double bot = l.at(i + 1, j) * (1 - tx) + l.at(i + 1, j + 1) * tx;
  return top * (1 - ty) + bot * ty;
}

/// Number of 4-connected components of {bilinear > level} sampled at every
/// `step` px over the mount.
inline int threshold_components(const aav::Field& f, const aav::GridConfig& cfg, double level, double step = 1.0) {
  const Lattice l = lattice(f, cfg);
  const int w = static_cast<int>(std::ceil(cfg.width_px / step));
  const int h = static_cast<int>(std::ceil(cfg.height_px / step));
  std::vector<int> mask(static_cast<std::size_t>(w) * h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      mask[static_cast<std::size_t>(y) * w + x] = bilinear(l, {(x + 0.5) * step, (y + 0.5) * step}) > level ? 1 : 0;
  int components = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < mask.size(); ++s) {
    if (mask[s] != 1) continue;
    ++components;
    mask[s] = 2;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const int x = static_cast<int>(k % w), y = static_cast<int>(k / w);
      const int nbr[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& n : nbr) {
        if (n[0] < 0 || n[1] < 0 || n[0] >= w || n[1] >= h) continue;
        const std::size_t q = static_cast<std::size_t>(n[1]) * w + n[0];
        if (mask[q] == 1) {
          mask[q] = 2;
          stack.push_back(q);
        }
      }
    }
  }
  return components;
}

struct ContourCheck {
  std::size_t points = 0;
  std::size_t mismatches = 0;
};

/// Threshold classification at every lattice node and at `per_edge` evenly
/// spaced points along every lattice edge (where the contour model is exactly
/// linear) must agree with ring parity. Points within `eps` of the level are
/// skipped.
inline ContourCheck check_threshold_parity(const aav::Field& f, const aav::GridConfig& cfg,
                                           const std::vector<aav::ContourRing>& rings, double level,
                                           int per_edge = 7, double eps = 1e-9) {
  const Lattice l = lattice(f, cfg);
  ContourCheck out;
  auto probe = [&](aav::Point2 p, double v) {
    if (std::abs(v - level) <= eps) return;
    ++out.points;
    const bool want = v > level;
    const bool got = ring_parity(rings, level, p) % 2 == 1;
    if (want != got) ++out.mismatches;
  };
  for (int i = 0; i < l.ny; ++i) {
    for (int j = 0; j < l.nx; ++j) {
      // Nodes on the mount border sit on some rings' vertices; nudge inward.
      const double x = std::clamp(l.xs[j], 1e-6, cfg.width_px - 1e-6);
      const double y = std::clamp(l.ys[i], 1e-6, cfg.height_px - 1e-6);
      probe({x, y}, l.at(i, j));
      for (int k = 1; k <= per_edge; ++k) {
        const double t = static_cast<double>(k) / (per_edge + 1);
        if (j + 1 < l.nx && i > 0 && i + 1 < l.ny)
          probe({l.xs[j] + t * (l.xs[j + 1] - l.xs[j]), l.ys[i]}, l.at(i, j) * (1 - t) + l.at(i, j + 1) * t);
        if (i + 1 < l.ny && j > 0 && j + 1 < l.nx)
          probe({l.xs[j], l.ys[i] + t * (l.ys[i + 1] - l.ys[i])}, l.at(i, j) * (1 - t) + l.at(i + 1, j) * t);
      }
    }
  }
  return out;
}

/// True when the point lies on a lattice line (vertical x = xs[j] or
/// horizontal y = ys[i]).
inline bool on_lattice_edge(const Lattice& l, aav::Point2 p, double tol = 1e-9) {
  for (double x : l.xs)
    if (std::abs(p.x - x) <= tol) return true;
  for (double y : l.ys)
    if (std::abs(p.y - y) <= tol) return true;
  return false;
}

}  // namespace oracle
