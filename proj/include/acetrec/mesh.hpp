#pragma once

#include "acetrec/curve.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace acetrec {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Indexed triangle surface, millimetres.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
  bool empty() const { return vertices.empty(); }

  /// Face indices in range, no repeated index within a face, finite coordinates.
  void validate() const;
};

/// v -> scale * rotation * v + translation
struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static SimilarityTransform identity() { return {}; }

  Vec3 apply(const Vec3& v) const { return scale * (rotation * v) + translation; }
  void validate() const;
};

/// Composition: (a * b)(v) == a(b(v)).
SimilarityTransform operator*(const SimilarityTransform& a, const SimilarityTransform& b);

/// Pinhole camera: p ~ K (R P + t).
struct View {
  Mat3 K = Mat3::Identity();
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();
  int width = 0;
  int height = 0;

  void validate() const;

  /// Depth of a model-frame point in the camera frame.
  double depth(const Vec3& p) const { return (R * p + t).z(); }

  /// Dehomogenized image of a model-frame point. No depth check.
  Vec2 project(const Vec3& p) const {
    const Vec3 h = K * (R * p + t);
    return {h.x() / h.z(), h.y() / h.z()};
  }
};

/// View whose pose first applies the rigid part of `xf` (scale must be 1),
/// so that project(apply_similarity(M, xf), view) == project(M, compose(view, xf)).
View compose(const View& view, const SimilarityTransform& xf);

struct ProjectedSet {
  std::vector<Vec2> points;
  std::vector<int> source_vertex;
};

struct SilhouetteCurve {
  std::vector<Vec2> points;
  std::vector<int> source_vertex;
  bool closed = true;

  Curve2D as_curve() const { return Curve2D{points, closed}; }
};

/// Upper (z >= 0) half of a sphere of `radius` centred at the origin, built
/// by midpoint subdivision of the upper half of an octahedron.
Mesh generate_hemisphere(double radius, int refinement_level);

Mesh apply_similarity(const Mesh& mesh, const SimilarityTransform& xf);

/// Throws ProjectionError naming the first vertex with non-positive depth.
ProjectedSet project_vertices(const Mesh& mesh, const View& view);

/// 3x the median nearest-neighbour spacing of the distinct points.
double default_alpha(const std::vector<Vec2>& points);

/// Ordered outer boundary of the alpha shape of the projected points
/// (Delaunay triangles with circumradius < alpha). Throws
/// DegenerateInputError for < 3 distinct points, collinear input, or an
/// alpha so small that no triangle survives.
SilhouetteCurve extract_silhouette(const ProjectedSet& projected, double alpha);
SilhouetteCurve extract_silhouette(const ProjectedSet& projected);

/// Exact minimum distance from p to any triangle of the mesh.
double point_to_surface_distance(const Vec3& p, const Mesh& mesh);

/// Sum of triangle areas.
double surface_area(const Mesh& mesh);

/// Length of the axis-aligned bounding-box diagonal.
double bounding_box_diagonal(const Mesh& mesh);

/// Rotation about a unit axis through the origin (right-handed, radians).
Mat3 axis_angle_rotation(const Vec3& axis, double angle);

/// Smallest rotation taking unit vector `from` onto unit vector `to`.
Mat3 rotation_between(const Vec3& from, const Vec3& to);

}  // namespace acetrec
