#pragma once

// Data-aware recording for 3D scenes. Visibility is resolved through an
// off-screen ID buffer: every triangle is drawn in a colour that encodes its
// object id (red channel) and face id (green/blue channels), so reading a
// pixel back yields the face that is visible there.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aav/model.hpp"

namespace aav {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;
};

double dot(Vec3 a, Vec3 b);
Vec3 cross(Vec3 a, Vec3 b);
double length(Vec3 v);

struct Face {
  std::uint32_t a = 0, b = 0, c = 0;
  friend bool operator==(const Face&, const Face&) = default;
};

/// One mesh; face ids are positions in `faces`.
struct SceneObject {
  int object_id = 1;
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

using Scene = std::vector<SceneObject>;

/// Throws unless ids are unique and within the colour budget and all face
/// indices reference existing vertices.
void validate_scene(const Scene& scene);

struct Camera {
  Vec3 position{0.0, 0.0, 0.0};
  Vec3 forward{0.0, 0.0, -1.0};
  Vec3 up{0.0, 1.0, 0.0};
  double fov_y_deg = 60.0;
  double near_plane = 0.1;
  double far_plane = 100.0;
  int viewport_width = 256;
  int viewport_height = 256;

  void validate() const;
  friend bool operator==(const Camera&, const Camera&) = default;
};

struct FaceKey {
  int object_id = 0;
  int face_id = 0;
  friend auto operator<=>(const FaceKey&, const FaceKey&) = default;
};

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

/// r = object id, (g, b) = face id in base 256. (0, 0, 0) is background.
Rgb8 encode_id(int object_id, int face_id);
FaceKey decode_id(Rgb8 color);

struct PickResolution {
  int width = 256;
  int height = 256;
};

class PickBuffer {
 public:
  PickBuffer(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  Rgb8 color(int x, int y) const;
  std::optional<FaceKey> at(int x, int y) const;
  double depth(int x, int y) const { return depth_[offset(x, y)]; }

  /// Depth-tested write; keeps the existing pixel unless `z` is strictly nearer.
  void write(int x, int y, double z, Rgb8 color);

  friend bool operator==(const PickBuffer&, const PickBuffer&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Rgb8> colors_;
  std::vector<double> depth_;
};

/// Perspective z-buffered rendering of front-facing triangles into an ID
/// buffer. Pixel (x, y) samples the point (x + 0.5, y + 0.5); the viewport
/// aspect ratio of the camera is kept regardless of buffer resolution.
PickBuffer rasterize(const Scene& scene, const Camera& camera, PickResolution resolution = {});

/// Distinct faces visible at pixels whose centre lies in the closed disk.
std::vector<FaceKey> sample_visible_faces(const PickBuffer& buffer, Point2 center_px, double radius_px);

/// Attention per scene face, keyed by (object id, face id).
class MarkAttentionMap {
 public:
  MarkAttentionMap() = default;
  explicit MarkAttentionMap(const Scene& scene);

  const std::vector<FaceKey>& keys() const { return keys_; }
  std::optional<std::size_t> index_of(FaceKey key) const;
  const AttentionMap& map() const { return map_; }
  AttentionMap& map() { return map_; }

  friend bool operator==(const MarkAttentionMap&, const MarkAttentionMap&) = default;

 private:
  std::vector<FaceKey> keys_;
  AttentionMap map_;
};

struct MarksOptions {
  PickResolution pick;
  /// Disk radius of screen-center samples, as a fraction of the buffer width.
  double center_radius_fraction = 0.1;
};

/// Converts a sample to pick-buffer coordinates: the disk centre and radius.
std::pair<Point2, double> pick_disk(const AttentionSample& sample, const Camera& camera,
                                    const ModelParams& params, const MarksOptions& options);

/// One tick of data-aware recording. The scene is rasterized only when a
/// sample is present; without one every face decays.
void apply_sample_3d(MarkAttentionMap& map, const Scene& scene, const Camera& camera,
                     const AttentionSample* sample, const ModelParams& params,
                     const MarksOptions& options = {});

/// Parses the "v x y z" / "f i j k" subset of Wavefront OBJ. Polygons are
/// fan-triangulated; unsupported statements are skipped.
SceneObject parse_obj(std::string_view text, int object_id);
SceneObject load_obj(const std::string& path, int object_id);

}  // namespace aav
