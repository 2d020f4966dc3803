#include "dci/mesh.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "dci/error.hpp"

namespace dci {
namespace {

constexpr double kNormalTolerance = 1e-9;

[[noreturn]] void fail(const std::string& source, int line_no, const std::string& what) {
  throw ParseError(source + ":" + std::to_string(line_no) + ": " + what);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view tok, const std::string& source, int line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    fail(source, line_no, "malformed number '" + std::string(tok) + "'");
  }
  return value;
}

// Face references look like "12", "12/34", "12//56", or "12/34/56"; only
// the leading vertex index matters here.
int parse_face_vertex(std::string_view tok, const std::string& source, int line_no) {
  std::string_view head = tok.substr(0, tok.find('/'));
  int idx = 0;
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc{} || ptr != head.data() + head.size()) {
    fail(source, line_no, "malformed face reference '" + std::string(tok) + "'");
  }
  if (idx <= 0) {
    fail(source, line_no,
         "unsupported face index " + std::to_string(idx) + " (positive 1-based indices only)");
  }
  return idx;
}

}  // namespace

Vec3 compute_face_normal(const Mesh& mesh, std::size_t f) {
  const auto& face = mesh.faces[f];
  const Vec3& a = mesh.vertices[face[0]];
  const Vec3& b = mesh.vertices[face[1]];
  const Vec3& c = mesh.vertices[face[2]];
  return (b - a).cross(c - a).normalized();
}

Mesh parse_obj(std::istream& in, const std::string& source_name) {
  Mesh mesh;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0][0] == '#') continue;
    std::string_view key = tokens[0];
    if (key == "v") {
      if (tokens.size() < 4) fail(source_name, line_no, "vertex line needs 3 coordinates");
      mesh.vertices.push_back({parse_double(tokens[1], source_name, line_no),
                               parse_double(tokens[2], source_name, line_no),
                               parse_double(tokens[3], source_name, line_no)});
    } else if (key == "vn") {
      if (tokens.size() < 4) fail(source_name, line_no, "normal line needs 3 coordinates");
      Vec3 n{parse_double(tokens[1], source_name, line_no),
             parse_double(tokens[2], source_name, line_no),
             parse_double(tokens[3], source_name, line_no)};
      if (n.norm() == 0.0) fail(source_name, line_no, "zero-length vertex normal");
      mesh.normals.push_back(n.normalized());
    } else if (key == "f") {
      if (tokens.size() != 4) {
        fail(source_name, line_no,
             "face has " + std::to_string(tokens.size() - 1) +
                 " vertices; only triangles are supported");
      }
      std::array<int, 3> face{};
      for (int k = 0; k < 3; ++k) {
        int idx = parse_face_vertex(tokens[k + 1], source_name, line_no);
        if (static_cast<std::size_t>(idx) > mesh.vertices.size()) {
          fail(source_name, line_no,
               "face index " + std::to_string(idx) + " out of range (" +
                   std::to_string(mesh.vertices.size()) + " vertices so far)");
        }
        face[k] = idx - 1;
      }
      if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
        fail(source_name, line_no, "face repeats a vertex index");
      }
      mesh.faces.push_back(face);
      Vec3 n = compute_face_normal(mesh, mesh.faces.size() - 1);
      if (std::abs(n.norm() - 1.0) > kNormalTolerance) {
        fail(source_name, line_no, "degenerate face (zero area)");
      }
      mesh.face_normals.push_back(n);
    }
    // vt, o, g, s, usemtl, mtllib and anything else: ignored.
  }
  return mesh;
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_mesh: cannot open " + path.string());
  return parse_obj(in, path.filename().string());
}

}  // namespace dci
