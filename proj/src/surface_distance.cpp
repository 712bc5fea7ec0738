#include "acetrec/surface_distance.hpp"

#include "acetrec/errors.hpp"

#include <algorithm>
#include <limits>

namespace acetrec {

// Region-based closest point (Ericson, Real-Time Collision Detection, 5.1.5).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }

  const double denom = va + vb + vc;
  if (denom == 0.0) {
    // Degenerate (zero-area) triangle: nearest of its edges.
    Vec3 best = a;
    double best_d = (p - a).squaredNorm();
    auto edge = [&](const Vec3& s, const Vec3& e) {
      const Vec3 d = e - s;
      const double len2 = d.squaredNorm();
      const double u = len2 > 0.0 ? std::clamp((p - s).dot(d) / len2, 0.0, 1.0) : 0.0;
      const Vec3 q = s + u * d;
      if ((p - q).squaredNorm() < best_d) {
        best_d = (p - q).squaredNorm();
        best = q;
      }
    };
    edge(a, b);
    edge(b, c);
    edge(c, a);
    return best;
  }
  const double v = vb / denom;
  const double w = vc / denom;
  return a + ab * v + ac * w;
}

double point_to_surface_distance(const Vec3& p, const Mesh& mesh) {
  if (mesh.faces.empty() || mesh.vertices.empty()) throw ParameterError("distance query on an empty mesh");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : mesh.faces) {
    const Vec3 q = closest_point_on_triangle(p, mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
    best = std::min(best, (p - q).squaredNorm());
  }
  return std::sqrt(best);
}

SurfaceDistanceQuery::SurfaceDistanceQuery(const Mesh& mesh) : vertices_(mesh.vertices), faces_(mesh.faces) {
  if (faces_.empty() || vertices_.empty()) throw ParameterError("distance query on an empty mesh");
  nodes_.reserve(2 * faces_.size());
  build(0, static_cast<int>(faces_.size()));
}

int SurfaceDistanceQuery::build(int begin, int end) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Eigen::AlignedBox3d box;
  Eigen::AlignedBox3d centroids;
  for (int f = begin; f < end; ++f) {
    Vec3 centroid = Vec3::Zero();
    for (int k : faces_[f]) {
      box.extend(vertices_[k]);
      centroid += vertices_[k];
    }
    centroids.extend(centroid / 3.0);
  }
  nodes_[index].box = box;
  if (end - begin <= 8) {
    nodes_[index].begin = begin;
    nodes_[index].end = end;
    return index;
  }
  int axis = 0;
  centroids.sizes().maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  auto key = [&](const std::array<int, 3>& f) {
    return vertices_[f[0]][axis] + vertices_[f[1]][axis] + vertices_[f[2]][axis];
  };
  std::nth_element(faces_.begin() + begin, faces_.begin() + mid, faces_.begin() + end,
                   [&](const auto& x, const auto& y) { return key(x) < key(y); });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[index].left = left;
  nodes_[index].right = right;
  return index;
}

double SurfaceDistanceQuery::distance(const Vec3& p) const {
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> stack = {0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    if (node.box.squaredExteriorDistance(p) >= best) continue;
    if (node.left < 0) {
      for (int f = node.begin; f < node.end; ++f) {
        const auto& face = faces_[f];
        const Vec3 q = closest_point_on_triangle(p, vertices_[face[0]], vertices_[face[1]], vertices_[face[2]]);
        best = std::min(best, (p - q).squaredNorm());
      }
      continue;
    }
    const double dl = nodes_[node.left].box.squaredExteriorDistance(p);
    const double dr = nodes_[node.right].box.squaredExteriorDistance(p);
    // Visit the nearer child first.
    if (dl < dr) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return std::sqrt(best);
}

}  // namespace acetrec
