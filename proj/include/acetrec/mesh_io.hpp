#pragma once

#include "acetrec/mesh.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace acetrec {

// ASCII PLY and OBJ, vertices and triangular faces only. PLY output can
// carry one extra per-vertex float property (e.g. `error_mm`).

struct VertexScalar {
  std::string name;
  std::vector<double> values;
};

void write_ply(std::ostream& out, const Mesh& mesh, const std::optional<VertexScalar>& scalar = std::nullopt);
void write_ply(const std::string& path, const Mesh& mesh,
               const std::optional<VertexScalar>& scalar = std::nullopt);
Mesh read_ply(std::istream& in);

void write_obj(std::ostream& out, const Mesh& mesh);
Mesh read_obj(std::istream& in);

/// Dispatch on extension (.ply / .obj).
Mesh read_mesh(const std::string& path);
void write_mesh(const std::string& path, const Mesh& mesh);

// View JSON: {"K": [9 row-major], "R": [9 row-major], "t": [3], "width": w, "height": h}.
// A views file holds either one such object, an array of them, or {"views": [...]}.
std::string view_to_json(const View& view);
View view_from_json(const std::string& text);
void write_views(const std::string& path, const std::vector<View>& views);
std::vector<View> read_views(const std::string& path);

}  // namespace acetrec
