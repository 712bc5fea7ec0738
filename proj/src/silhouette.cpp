#include "acetrec/delaunay.hpp"
#include "acetrec/errors.hpp"
#include "acetrec/mesh.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>
#include <unordered_set>

namespace acetrec {

namespace {

std::uint64_t edge_key(int a, int b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

double median_nn_spacing(const std::vector<Vec2>& points, const DelaunayTriangulation& tri) {
  std::unordered_map<int, double> nearest;
  for (const auto& t : tri.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k];
      const int b = t[(k + 1) % 3];
      const double d = (points[a] - points[b]).norm();
      auto update = [&](int v) {
        auto [it, inserted] = nearest.emplace(v, d);
        if (!inserted) it->second = std::min(it->second, d);
      };
      update(a);
      update(b);
    }
  }
  if (nearest.empty()) throw DegenerateInputError("cannot estimate point spacing: no triangles");
  std::vector<double> spacing;
  spacing.reserve(nearest.size());
  for (const auto& [v, d] : nearest) spacing.push_back(d);
  auto mid = spacing.begin() + static_cast<std::ptrdiff_t>(spacing.size() / 2);
  std::nth_element(spacing.begin(), mid, spacing.end());
  return *mid;
}

DelaunayTriangulation checked_triangulation(const std::vector<Vec2>& points) {
  if (points.size() < 3) {
    throw DegenerateInputError(fmt::format("alpha shape needs >= 3 points, got {}", points.size()));
  }
  auto tri = delaunay_triangulate(points);
  if (tri.unique_points.size() < 3) {
    throw DegenerateInputError("alpha shape needs >= 3 distinct points");
  }
  if (tri.triangles.empty()) throw DegenerateInputError("alpha shape input is collinear");
  return tri;
}

// Counter-clockwise angle in [0, 2pi) turning from u to v.
double ccw_angle(const Vec2& u, const Vec2& v) {
  double a = std::atan2(u.x() * v.y() - u.y() * v.x(), u.dot(v));
  if (a <= 0.0) a += 2.0 * std::numbers::pi;
  return a;
}

SilhouetteCurve boundary_of(const ProjectedSet& projected, const DelaunayTriangulation& tri,
                            double alpha) {
  const auto& pts = projected.points;
  std::unordered_set<std::uint64_t> directed;
  std::vector<std::array<int, 3>> kept;
  for (const auto& t : tri.triangles) {
    if (circumradius(pts[t[0]], pts[t[1]], pts[t[2]]) < alpha) {
      kept.push_back(t);
      for (int k = 0; k < 3; ++k) directed.insert(edge_key(t[k], t[(k + 1) % 3]));
    }
  }
  if (kept.empty()) {
    throw DegenerateInputError(fmt::format("alpha {} keeps no triangle", alpha));
  }

  // Boundary edges keep the interior on their left.
  std::unordered_map<int, std::vector<int>> outgoing;
  std::size_t boundary_count = 0;
  for (const auto& t : kept) {
    for (int k = 0; k < 3; ++k) {
      const int a = t[k];
      const int b = t[(k + 1) % 3];
      if (!directed.count(edge_key(b, a))) {
        outgoing[a].push_back(b);
        ++boundary_count;
      }
    }
  }
  for (auto& [v, targets] : outgoing) std::sort(targets.begin(), targets.end());

  std::unordered_set<std::uint64_t> used;
  std::vector<int> best_loop;
  double best_area = -std::numeric_limits<double>::infinity();
  std::vector<int> starts;
  starts.reserve(outgoing.size());
  for (const auto& [v, targets] : outgoing) starts.push_back(v);
  std::sort(starts.begin(), starts.end());

  for (int start : starts) {
    for (int first_target : outgoing[start]) {
      if (used.count(edge_key(start, first_target))) continue;
      std::vector<int> loop;
      int from = start;
      int to = first_target;
      used.insert(edge_key(from, to));
      loop.push_back(from);
      for (std::size_t guard = 0; guard <= boundary_count; ++guard) {
        // At pinch vertices take the first outgoing edge counter-clockwise
        // from the reversed incoming edge, which merges touching pieces
        // into a single outer loop.
        const Vec2 back = pts[from] - pts[to];
        int next = -1;
        double best_turn = std::numeric_limits<double>::infinity();
        for (int cand : outgoing[to]) {
          if (used.count(edge_key(to, cand))) continue;
          const double turn = ccw_angle(back, pts[cand] - pts[to]);
          if (turn < best_turn) {
            best_turn = turn;
            next = cand;
          }
        }
        if (next < 0) break;
        loop.push_back(to);
        used.insert(edge_key(to, next));
        from = to;
        to = next;
      }
      if (to != start) throw InternalError("alpha-shape boundary walk did not close");
      std::vector<Vec2> poly;
      poly.reserve(loop.size());
      for (int v : loop) poly.push_back(pts[v]);
      const double area = signed_area(poly);
      if (area > best_area) {
        best_area = area;
        best_loop = std::move(loop);
      }
    }
  }

  SilhouetteCurve out;
  out.closed = true;
  out.points.reserve(best_loop.size());
  out.source_vertex.reserve(best_loop.size());
  for (int v : best_loop) {
    out.points.push_back(pts[v]);
    out.source_vertex.push_back(projected.source_vertex[v]);
  }
  return out;
}

void check_projected(const ProjectedSet& projected) {
  if (projected.points.size() != projected.source_vertex.size()) {
    throw ParameterError("projected set has mismatched point/source lists");
  }
}

}  // namespace

double default_alpha(const std::vector<Vec2>& points) {
  const auto tri = checked_triangulation(points);
  return 3.0 * median_nn_spacing(points, tri);
}

SilhouetteCurve extract_silhouette(const ProjectedSet& projected, double alpha) {
  check_projected(projected);
  if (!(alpha > 0.0)) throw ParameterError(fmt::format("alpha must be positive, got {}", alpha));
  const auto tri = checked_triangulation(projected.points);
  return boundary_of(projected, tri, alpha);
}

SilhouetteCurve extract_silhouette(const ProjectedSet& projected) {
  check_projected(projected);
  const auto tri = checked_triangulation(projected.points);
  const double alpha = 3.0 * median_nn_spacing(projected.points, tri);
  return boundary_of(projected, tri, alpha);
}

}  // namespace acetrec
