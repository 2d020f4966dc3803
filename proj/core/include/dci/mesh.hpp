#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <vector>

#include "dci/vec.hpp"

namespace dci {

/// Triangle mesh in model space (meters). Face normals are derived from
/// vertex positions at load time (flat shading); vertex normals are kept
/// for bookkeeping but the renderer does not interpolate them.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;                    // unit vertex normals (vn)
  std::vector<std::array<int, 3>> faces;        // vertex index triples
  std::vector<Vec3> face_normals;               // unit, derived

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
};

/// Loads the supported OBJ subset: `v x y z`, `vn x y z`, and triangular
/// `f` lines (`v`, `v/vt`, `v//vn`, `v/vt/vn` reference forms; only the
/// vertex index is used). `vt` lines and grouping/material statements are
/// ignored. Quads and larger polygons are rejected, not triangulated.
/// Every parse error names the offending line number.
Mesh load_mesh(const std::filesystem::path& path);

/// Same grammar, reading from a stream; `source_name` labels error messages.
Mesh parse_obj(std::istream& in, const std::string& source_name);

/// Unit normal of face `f` recomputed from current vertex positions.
Vec3 compute_face_normal(const Mesh& mesh, std::size_t f);

}  // namespace dci
