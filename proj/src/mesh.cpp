#include "acetrec/mesh.hpp"

#include "acetrec/errors.hpp"

#include <Eigen/Geometry>
#include <fmt/format.h>

#include <cmath>
#include <map>
#include <utility>

namespace acetrec {

void Mesh::validate() const {
  const auto n = static_cast<int>(vertices.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& face = faces[f];
    for (int idx : face) {
      if (idx < 0 || idx >= n) {
        throw ParameterError(fmt::format("face {} references vertex {} (vertex count {})", f, idx, n));
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw ParameterError(fmt::format("face {} repeats a vertex index", f));
    }
  }
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (!vertices[i].allFinite()) throw ParameterError(fmt::format("vertex {} is not finite", i));
  }
}

namespace {

bool is_rotation(const Mat3& r, double tol) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol && r.determinant() > 0.0;
}

}  // namespace

void SimilarityTransform::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw ParameterError(fmt::format("similarity scale must be positive, got {}", scale));
  }
  if (!is_rotation(rotation, 1e-9)) throw ParameterError("similarity rotation is not orthonormal with det +1");
  if (!translation.allFinite()) throw ParameterError("similarity translation is not finite");
}

SimilarityTransform operator*(const SimilarityTransform& a, const SimilarityTransform& b) {
  SimilarityTransform out;
  out.scale = a.scale * b.scale;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.scale * (a.rotation * b.translation) + a.translation;
  return out;
}

void View::validate() const {
  if (K(2, 2) != 1.0 || K(1, 0) != 0.0 || K(2, 0) != 0.0 || K(2, 1) != 0.0) {
    throw ParameterError("intrinsics must be upper triangular with K[2][2] = 1");
  }
  if (!K.allFinite() || !t.allFinite()) throw ParameterError("view has non-finite entries");
  if (!is_rotation(R, 1e-9)) throw ParameterError("view rotation is not orthonormal with det +1");
  if (width < 0 || height < 0) throw ParameterError("image size must be non-negative");
}

View compose(const View& view, const SimilarityTransform& xf) {
  if (std::abs(xf.scale - 1.0) > 1e-12) {
    throw ParameterError("only rigid transforms (scale 1) compose into a camera pose");
  }
  View out = view;
  out.R = view.R * xf.rotation;
  out.t = view.R * xf.translation + view.t;
  return out;
}

Mesh generate_hemisphere(double radius, int refinement_level) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ParameterError(fmt::format("hemisphere radius must be positive, got {}", radius));
  }
  if (refinement_level < 0 || refinement_level > 7) {
    throw ParameterError(fmt::format("refinement level must be in [0, 7], got {}", refinement_level));
  }
  // Unit directions; the equator stays exactly on z = 0 under midpoint
  // subdivision followed by normalization.
  std::vector<Vec3> dirs = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, 1}};
  std::vector<std::array<int, 3>> faces = {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};

  for (int level = 0; level < refinement_level; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      Vec3 m = dirs[a] + dirs[b];
      m.normalize();
      if (dirs[a].z() == 0.0 && dirs[b].z() == 0.0) m.z() = 0.0;
      dirs.push_back(m);
      const int idx = static_cast<int>(dirs.size()) - 1;
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({ab, f[1], bc});
      next.push_back({ca, bc, f[2]});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  Mesh mesh;
  mesh.vertices.reserve(dirs.size());
  for (const auto& d : dirs) mesh.vertices.push_back(radius * d);
  mesh.faces = std::move(faces);
  return mesh;
}

Mesh apply_similarity(const Mesh& mesh, const SimilarityTransform& xf) {
  xf.validate();
  Mesh out;
  out.faces = mesh.faces;
  out.vertices.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) out.vertices.push_back(xf.apply(v));
  return out;
}

ProjectedSet project_vertices(const Mesh& mesh, const View& view) {
  ProjectedSet out;
  out.points.reserve(mesh.vertices.size());
  out.source_vertex.reserve(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3 cam = view.R * mesh.vertices[i] + view.t;
    if (!(cam.z() > 0.0)) {
      throw ProjectionError(fmt::format("vertex {} has non-positive depth {}", i, cam.z()),
                            static_cast<long>(i));
    }
    const Vec3 h = view.K * cam;
    out.points.emplace_back(h.x() / h.z(), h.y() / h.z());
    out.source_vertex.push_back(static_cast<int>(i));
  }
  return out;
}

double surface_area(const Mesh& mesh) {
  double area = 0.0;
  for (const auto& f : mesh.faces) {
    const Vec3& a = mesh.vertices[f[0]];
    area += 0.5 * (mesh.vertices[f[1]] - a).cross(mesh.vertices[f[2]] - a).norm();
  }
  return area;
}

double bounding_box_diagonal(const Mesh& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  Vec3 lo = mesh.vertices.front();
  Vec3 hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

Mat3 axis_angle_rotation(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

Mat3 rotation_between(const Vec3& from, const Vec3& to) {
  return Eigen::Quaterniond::FromTwoVectors(from, to).toRotationMatrix();
}

}  // namespace acetrec
