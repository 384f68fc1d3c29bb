#include "aav/marks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "aav/error.hpp"

namespace aav {

double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
double length(Vec3 v) { return std::sqrt(dot(v, v)); }

void validate_scene(const Scene& scene) {
  std::set<int> ids;
  for (const auto& obj : scene) {
    if (obj.object_id < 1 || obj.object_id > 255)
      fail(ErrorCode::OutOfRange, "object id " + std::to_string(obj.object_id) + " outside [1, 255]");
    if (!ids.insert(obj.object_id).second)
      fail(ErrorCode::InvalidArgument, "duplicate object id " + std::to_string(obj.object_id));
    if (obj.faces.size() > 65536)
      fail(ErrorCode::OutOfRange, "object " + std::to_string(obj.object_id) + " exceeds 65536 faces");
    for (const auto& f : obj.faces) {
      const auto n = obj.vertices.size();
      if (f.a >= n || f.b >= n || f.c >= n)
        fail(ErrorCode::OutOfRange, "face index out of range in object " + std::to_string(obj.object_id));
    }
  }
}

void Camera::validate() const {
  if (length(forward) == 0.0) fail(ErrorCode::InvalidArgument, "camera forward vector has zero length");
  if (length(cross(forward, up)) == 0.0)
    fail(ErrorCode::InvalidArgument, "camera up vector is parallel to forward");
  if (!(fov_y_deg > 0.0 && fov_y_deg < 180.0))
    fail(ErrorCode::InvalidArgument, "camera field of view must lie in (0, 180)");
  if (!(near_plane > 0.0 && near_plane < far_plane))
    fail(ErrorCode::InvalidArgument, "camera requires 0 < near < far");
  if (viewport_width <= 0 || viewport_height <= 0)
    fail(ErrorCode::InvalidArgument, "camera viewport must be positive");
}

Rgb8 encode_id(int object_id, int face_id) {
  if (object_id < 1 || object_id > 255)
    fail(ErrorCode::OutOfRange, "object id " + std::to_string(object_id) + " outside [1, 255]");
  if (face_id < 0 || face_id > 65535)
    fail(ErrorCode::OutOfRange, "face id " + std::to_string(face_id) + " outside [0, 65535]");
  return {static_cast<std::uint8_t>(object_id), static_cast<std::uint8_t>(face_id / 256),
          static_cast<std::uint8_t>(face_id % 256)};
}

FaceKey decode_id(Rgb8 color) { return {color.r, color.g * 256 + color.b}; }

PickBuffer::PickBuffer(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) fail(ErrorCode::InvalidArgument, "pick buffer size must be positive");
  colors_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Rgb8{});
  depth_.assign(colors_.size(), std::numeric_limits<double>::infinity());
}

Rgb8 PickBuffer::color(int x, int y) const { return colors_[offset(x, y)]; }

std::optional<FaceKey> PickBuffer::at(int x, int y) const {
  const Rgb8 c = colors_[offset(x, y)];
  if (c == Rgb8{}) return std::nullopt;
  return decode_id(c);
}

void PickBuffer::write(int x, int y, double z, Rgb8 color) {
  const auto i = offset(x, y);
  if (z < depth_[i]) {
    depth_[i] = z;
    colors_[i] = color;
  }
}

namespace {

struct CameraFrame {
  Vec3 origin, right, up, forward;
  double tan_half_fov;
  double aspect;

  Vec3 to_view(Vec3 p) const {
    const Vec3 d = p - origin;
    return {dot(d, right), dot(d, up), dot(d, forward)};
  }
};

CameraFrame make_frame(const Camera& cam) {
  cam.validate();
  CameraFrame f;
  f.origin = cam.position;
  f.forward = cam.forward * (1.0 / length(cam.forward));
  const Vec3 r = cross(f.forward, cam.up);
  f.right = r * (1.0 / length(r));
  f.up = cross(f.right, f.forward);
  f.tan_half_fov = std::tan(cam.fov_y_deg * std::numbers::pi / 360.0);
  f.aspect = static_cast<double>(cam.viewport_width) / static_cast<double>(cam.viewport_height);
  return f;
}

// Screen-space vertex; `inv_z` is the reciprocal view depth, which is affine
// in screen space.
struct ScreenVertex {
  double x, y, inv_z;
};

double edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

bool top_left(const ScreenVertex& a, const ScreenVertex& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

bool covers(double w, bool tl) { return w > 0.0 || (w == 0.0 && tl); }

void draw_triangle(PickBuffer& buf, ScreenVertex a, ScreenVertex b, ScreenVertex c,
                   double far_plane, Rgb8 color) {
  double area = edge(a, b, c.x, c.y);
  // With y pointing down, counter-clockwise (front-facing) triangles have
  // negative signed area here.
  if (!(area < 0.0)) return;
  std::swap(b, c);
  area = -area;

  const int x_min = std::max(0, static_cast<int>(std::floor(std::min({a.x, b.x, c.x}) - 0.5)));
  const int x_max = std::min(buf.width() - 1, static_cast<int>(std::ceil(std::max({a.x, b.x, c.x}) - 0.5)));
  const int y_min = std::max(0, static_cast<int>(std::floor(std::min({a.y, b.y, c.y}) - 0.5)));
  const int y_max = std::min(buf.height() - 1, static_cast<int>(std::ceil(std::max({a.y, b.y, c.y}) - 0.5)));
  const bool tl0 = top_left(b, c), tl1 = top_left(c, a), tl2 = top_left(a, b);

  for (int y = y_min; y <= y_max; ++y) {
    const double py = y + 0.5;
    for (int x = x_min; x <= x_max; ++x) {
      const double px = x + 0.5;
      const double w0 = edge(b, c, px, py);
      const double w1 = edge(c, a, px, py);
      const double w2 = edge(a, b, px, py);
      if (!covers(w0, tl0) || !covers(w1, tl1) || !covers(w2, tl2)) continue;
      const double inv_z = (w0 * a.inv_z + w1 * b.inv_z + w2 * c.inv_z) / area;
      if (!(inv_z > 0.0)) continue;
      const double z = 1.0 / inv_z;
      if (z > far_plane) continue;
      buf.write(x, y, z, color);
    }
  }
}

// Sutherland-Hodgman against the plane z = near in view space.
std::vector<Vec3> clip_near(const std::array<Vec3, 3>& tri, double near_plane) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec3& cur = tri[i];
    const Vec3& nxt = tri[(i + 1) % 3];
    const bool cur_in = cur.z >= near_plane;
    const bool nxt_in = nxt.z >= near_plane;
    if (cur_in) out.push_back(cur);
    if (cur_in != nxt_in) {
      const double t = (near_plane - cur.z) / (nxt.z - cur.z);
      out.push_back(cur + (nxt - cur) * t);
    }
  }
  return out;
}

}  // namespace

PickBuffer rasterize(const Scene& scene, const Camera& camera, PickResolution resolution) {
  const CameraFrame frame = make_frame(camera);
  validate_scene(scene);
  PickBuffer buf(resolution.width, resolution.height);
  const double w = resolution.width;
  const double h = resolution.height;

  auto project = [&](Vec3 v) {
    const double ndc_x = v.x / (v.z * frame.tan_half_fov * frame.aspect);
    const double ndc_y = v.y / (v.z * frame.tan_half_fov);
    return ScreenVertex{(ndc_x + 1.0) * 0.5 * w, (1.0 - ndc_y) * 0.5 * h, 1.0 / v.z};
  };

  for (const auto& obj : scene) {
    std::vector<Vec3> view(obj.vertices.size());
    std::transform(obj.vertices.begin(), obj.vertices.end(), view.begin(),
                   [&](Vec3 p) { return frame.to_view(p); });
    for (std::size_t f = 0; f < obj.faces.size(); ++f) {
      const Face& face = obj.faces[f];
      const Rgb8 color = encode_id(obj.object_id, static_cast<int>(f));
      const std::array<Vec3, 3> tri{view[face.a], view[face.b], view[face.c]};
      if (tri[0].z < camera.near_plane || tri[1].z < camera.near_plane || tri[2].z < camera.near_plane) {
        const auto poly = clip_near(tri, camera.near_plane);
        if (poly.size() < 3) continue;
        const ScreenVertex p0 = project(poly[0]);
        for (std::size_t i = 1; i + 1 < poly.size(); ++i)
          draw_triangle(buf, p0, project(poly[i]), project(poly[i + 1]), camera.far_plane, color);
      } else {
        draw_triangle(buf, project(tri[0]), project(tri[1]), project(tri[2]), camera.far_plane, color);
      }
    }
  }
  return buf;
}

std::vector<FaceKey> sample_visible_faces(const PickBuffer& buffer, Point2 center, double radius) {
  std::vector<FaceKey> out;
  if (!(radius >= 0.0)) return out;
  const int x0 = std::max(0, static_cast<int>(std::floor(center.x - radius - 0.5)));
  const int x1 = std::min(buffer.width() - 1, static_cast<int>(std::ceil(center.x + radius - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::floor(center.y - radius - 0.5)));
  const int y1 = std::min(buffer.height() - 1, static_cast<int>(std::ceil(center.y + radius - 0.5)));
  const double r2 = radius * radius;
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - center.x;
      const double dy = y + 0.5 - center.y;
      if (dx * dx + dy * dy > r2) continue;
      if (auto key = buffer.at(x, y)) out.push_back(*key);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MarkAttentionMap::MarkAttentionMap(const Scene& scene) {
  validate_scene(scene);
  for (const auto& obj : scene)
    for (std::size_t f = 0; f < obj.faces.size(); ++f) keys_.push_back({obj.object_id, static_cast<int>(f)});
  std::sort(keys_.begin(), keys_.end());
  map_ = AttentionMap(keys_.size());
}

std::optional<std::size_t> MarkAttentionMap::index_of(FaceKey key) const {
  const auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys_.begin());
}

std::pair<Point2, double> pick_disk(const AttentionSample& sample, const Camera& camera,
                                    const ModelParams& params, const MarksOptions& options) {
  const double sx = static_cast<double>(options.pick.width) / camera.viewport_width;
  const double sy = static_cast<double>(options.pick.height) / camera.viewport_height;
  if (sample.position) {
    const double r = sample.radius_px.value_or(params.default_radius_px);
    return {{sample.position->x * sx, sample.position->y * sy}, r * sx};
  }
  const Point2 center{options.pick.width / 2.0, options.pick.height / 2.0};
  if (sample.radius_px) return {center, *sample.radius_px * sx};
  return {center, options.center_radius_fraction * options.pick.width};
}

void apply_sample_3d(MarkAttentionMap& map, const Scene& scene, const Camera& camera,
                     const AttentionSample* sample, const ModelParams& params,
                     const MarksOptions& options) {
  std::vector<std::size_t> hit;
  std::optional<Source> source;
  if (sample) {
    if (sample->radius_px && *sample->radius_px < 0.0)
      fail(ErrorCode::InvalidArgument, "sample radius must be non-negative");
    const PickBuffer buf = rasterize(scene, camera, options.pick);
    const auto [center, radius] = pick_disk(*sample, camera, params, options);
    for (const FaceKey& key : sample_visible_faces(buf, center, radius)) {
      const auto idx = map.index_of(key);
      if (!idx) fail(ErrorCode::State, "pick buffer references a face outside the attention map");
      hit.push_back(*idx);
    }
    source = sample->source;
  }
  step_session(map.map(), hit, source, params);
}

}  // namespace aav
