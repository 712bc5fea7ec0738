#pragma once

#include "acetrec/curve.hpp"

#include <array>
#include <vector>

namespace acetrec {

/// Delaunay triangulation of a planar point set.
///
/// Coordinates are snapped to a power-of-two integer lattice (about 2^29
/// units across the largest absolute coordinate) so the underlying Voronoi
/// construction runs on exact predicates. Points that coincide after
/// snapping are merged; `representative[i]` is the lowest input index that
/// shares point i's lattice position. Triangles index input points (always
/// representatives) and are counter-clockwise in a y-up frame. Cocircular
/// groups are fan-triangulated.
struct DelaunayTriangulation {
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> representative;
  std::vector<int> unique_points;  ///< representatives, ascending
};

DelaunayTriangulation delaunay_triangulate(const std::vector<Vec2>& points);

/// Circumradius of a triangle; +inf for collinear corners.
double circumradius(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace acetrec
