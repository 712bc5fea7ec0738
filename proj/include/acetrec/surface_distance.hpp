#pragma once

#include "acetrec/mesh.hpp"

#include <Eigen/Geometry>

#include <vector>

namespace acetrec {

/// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Repeated point-to-surface queries against one mesh, accelerated by an
/// axis-aligned bounding-box tree over the faces.
class SurfaceDistanceQuery {
 public:
  explicit SurfaceDistanceQuery(const Mesh& mesh);

  double distance(const Vec3& p) const;

 private:
  struct Node {
    Eigen::AlignedBox3d box;
    int left = -1;   // child node, or -1 for a leaf
    int right = -1;
    int begin = 0;   // face range for leaves
    int end = 0;
  };

  int build(int begin, int end);

  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> faces_;
  std::vector<Node> nodes_;
};

}  // namespace acetrec
