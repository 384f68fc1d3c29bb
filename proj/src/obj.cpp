#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "aav/error.hpp"
#include "aav/marks.hpp"

namespace aav {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorCode::Parse, "obj line " + std::to_string(line) + ": " + what);
}

// Resolves a face corner token ("7", "7/1", "7//3", "-1") to a 0-based index.
std::uint32_t corner_index(const std::string& token, std::size_t vertex_count, std::size_t line) {
  const std::string head = token.substr(0, token.find('/'));
  long long idx = 0;
  const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc{} || ptr != head.data() + head.size() || idx == 0)
    parse_fail(line, "bad face index '" + token + "'");
  const long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(vertex_count) + idx;
  if (resolved < 0 || resolved >= static_cast<long long>(vertex_count))
    parse_fail(line, "face index " + head + " out of range");
  return static_cast<std::uint32_t>(resolved);
}

}  // namespace

SceneObject parse_obj(std::string_view text, int object_id) {
  SceneObject obj;
  obj.object_id = object_id;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::istringstream line(raw);
    std::string tag;
    if (!(line >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 v;
      if (!(line >> v.x >> v.y >> v.z)) parse_fail(line_no, "vertex needs three coordinates");
      obj.vertices.push_back(v);
    } else if (tag == "f") {
      std::vector<std::uint32_t> corners;
      std::string tok;
      while (line >> tok) corners.push_back(corner_index(tok, obj.vertices.size(), line_no));
      if (corners.size() < 3) parse_fail(line_no, "face needs at least three vertices");
      for (std::size_t i = 1; i + 1 < corners.size(); ++i)
        obj.faces.push_back({corners[0], corners[i], corners[i + 1]});
    }
  }
  if (obj.faces.size() > 65536) fail(ErrorCode::OutOfRange, "mesh exceeds 65536 faces");
  return obj;
}

SceneObject load_obj(const std::string& path, int object_id) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open mesh file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_obj(ss.str(), object_id);
}

}  // namespace aav
