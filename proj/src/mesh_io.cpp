#include "acetrec/mesh_io.hpp"

#include "acetrec/errors.hpp"
#include "acetrec/json_codec.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace acetrec {

namespace {

std::string lower_extension(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return line;
  }
  throw IoError("unexpected end of mesh file");
}

}  // namespace

void write_ply(std::ostream& out, const Mesh& mesh, const std::optional<VertexScalar>& scalar) {
  if (scalar && scalar->values.size() != mesh.vertices.size()) {
    throw ParameterError("vertex scalar count does not match vertex count");
  }
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (scalar) out << "property double " << scalar->name << "\n";
  out << "element face " << mesh.faces.size() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const auto& v = mesh.vertices[i];
    out << fmt::format("{:.17g} {:.17g} {:.17g}", v.x(), v.y(), v.z());
    if (scalar) out << fmt::format(" {:.17g}", scalar->values[i]);
    out << "\n";
  }
  for (const auto& f : mesh.faces) out << "3 " << f[0] << " " << f[1] << " " << f[2] << "\n";
}

void write_ply(const std::string& path, const Mesh& mesh, const std::optional<VertexScalar>& scalar) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_ply(out, mesh, scalar);
  if (!out) throw IoError("failed writing " + path);
}

Mesh read_ply(std::istream& in) {
  if (next_content_line(in) != "ply") throw IoError("not a PLY file");
  std::size_t vertex_count = 0;
  std::size_t face_count = 0;
  std::vector<std::string> vertex_props;
  std::string current;
  bool ascii = false;
  while (true) {
    const std::string line = next_content_line(in);
    std::istringstream words(line);
    std::string word;
    words >> word;
    if (word == "end_header") break;
    if (word == "format") {
      std::string fmt_name;
      words >> fmt_name;
      ascii = fmt_name == "ascii";
    } else if (word == "element") {
      std::size_t count = 0;
      words >> current >> count;
      if (current == "vertex") vertex_count = count;
      if (current == "face") face_count = count;
    } else if (word == "property" && current == "vertex") {
      std::string type, name;
      words >> type >> name;
      vertex_props.push_back(name);
    }
  }
  if (!ascii) throw IoError("only ASCII PLY is supported");
  auto prop_index = [&](const std::string& name) {
    auto it = std::find(vertex_props.begin(), vertex_props.end(), name);
    if (it == vertex_props.end()) throw IoError("PLY vertex element lacks property " + name);
    return static_cast<std::size_t>(it - vertex_props.begin());
  };
  const std::size_t ix = prop_index("x"), iy = prop_index("y"), iz = prop_index("z");

  Mesh mesh;
  mesh.vertices.reserve(vertex_count);
  std::vector<double> values(vertex_props.size());
  for (std::size_t i = 0; i < vertex_count; ++i) {
    std::istringstream row(next_content_line(in));
    for (auto& v : values) {
      if (!(row >> v)) throw IoError(fmt::format("PLY vertex {} is truncated", i));
    }
    mesh.vertices.emplace_back(values[ix], values[iy], values[iz]);
  }
  mesh.faces.reserve(face_count);
  for (std::size_t f = 0; f < face_count; ++f) {
    std::istringstream row(next_content_line(in));
    int n = 0;
    row >> n;
    std::vector<int> idx(static_cast<std::size_t>(std::max(n, 0)));
    for (auto& v : idx) {
      if (!(row >> v)) throw IoError(fmt::format("PLY face {} is truncated", f));
    }
    if (n < 3) throw IoError(fmt::format("PLY face {} has {} vertices", f, n));
    for (int k = 1; k + 1 < n; ++k) mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
  }
  mesh.validate();
  return mesh;
}

void write_obj(std::ostream& out, const Mesh& mesh) {
  for (const auto& v : mesh.vertices) out << fmt::format("v {:.17g} {:.17g} {:.17g}\n", v.x(), v.y(), v.z());
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
}

Mesh read_obj(std::istream& in) {
  Mesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string tag;
    if (!(words >> tag)) continue;
    if (tag == "v") {
      double x = 0, y = 0, z = 0;
      if (!(words >> x >> y >> z)) throw IoError("malformed OBJ vertex: " + line);
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string token;
      while (words >> token) {
        // "i", "i/t", "i/t/n" or "i//n"; negative indices are relative.
        int i = std::stoi(token.substr(0, token.find('/')));
        i = i < 0 ? static_cast<int>(mesh.vertices.size()) + i : i - 1;
        idx.push_back(i);
      }
      if (idx.size() < 3) throw IoError("OBJ face with fewer than 3 vertices: " + line);
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) mesh.faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  mesh.validate();
  return mesh;
}

Mesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  const auto ext = lower_extension(path);
  if (ext == "ply") return read_ply(in);
  if (ext == "obj") return read_obj(in);
  throw IoError("unsupported mesh extension: " + path);
}

void write_mesh(const std::string& path, const Mesh& mesh) {
  const auto ext = lower_extension(path);
  if (ext == "ply") {
    write_ply(path, mesh);
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  if (ext == "obj") {
    write_obj(out, mesh);
  } else {
    throw IoError("unsupported mesh extension: " + path);
  }
}

std::string view_to_json(const View& view) { return json(view).dump(2); }

View view_from_json(const std::string& text) {
  try {
    View v = json::parse(text).get<View>();
    v.validate();
    return v;
  } catch (const json::exception& e) {
    throw IoError(std::string("bad view json: ") + e.what());
  }
}

void write_views(const std::string& path, const std::vector<View>& views) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << json{{"views", views}}.dump(2) << "\n";
}

std::vector<View> read_views(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    const json doc = json::parse(in);
    std::vector<View> views;
    if (doc.is_array()) {
      views = doc.get<std::vector<View>>();
    } else if (doc.contains("views")) {
      views = doc.at("views").get<std::vector<View>>();
    } else {
      views.push_back(doc.get<View>());
    }
    for (const auto& v : views) v.validate();
    return views;
  } catch (const json::exception& e) {
    throw IoError("bad views file " + path + ": " + e.what());
  }
}

}  // namespace acetrec
