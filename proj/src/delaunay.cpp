#include "acetrec/delaunay.hpp"

#include "acetrec/errors.hpp"

#include <boost/polygon/voronoi.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace acetrec {

namespace {

using IntPoint = boost::polygon::point_data<int>;

double lattice_scale(const std::vector<Vec2>& points) {
  double max_abs = 0.0;
  for (const auto& p : points) max_abs = std::max({max_abs, std::abs(p.x()), std::abs(p.y())});
  if (max_abs == 0.0) return 1.0;
  // Power of two keeps snapping exact under sign flips and integer shifts.
  const int exponent = static_cast<int>(std::floor(std::log2(std::ldexp(1.0, 29) / max_abs)));
  return std::ldexp(1.0, exponent);
}

long long orient(const IntPoint& a, const IntPoint& b, const IntPoint& c) {
  const long long abx = static_cast<long long>(b.x()) - a.x();
  const long long aby = static_cast<long long>(b.y()) - a.y();
  const long long acx = static_cast<long long>(c.x()) - a.x();
  const long long acy = static_cast<long long>(c.y()) - a.y();
  // |terms| < 2^62: products of 31-bit differences.
  return abx * acy - aby * acx;
}

}  // namespace

double circumradius(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double ab = (b - a).norm();
  const double bc = (c - b).norm();
  const double ca = (a - c).norm();
  const double cross = std::abs((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
  if (cross == 0.0) return std::numeric_limits<double>::infinity();
  return ab * bc * ca / (2.0 * cross);
}

DelaunayTriangulation delaunay_triangulate(const std::vector<Vec2>& points) {
  for (const auto& p : points) {
    if (!p.allFinite()) throw DegenerateInputError("triangulation input has non-finite coordinates");
  }
  DelaunayTriangulation result;
  result.representative.resize(points.size());

  const double scale = lattice_scale(points);
  std::map<std::pair<int, int>, int> first_at;
  std::vector<IntPoint> lattice;
  std::vector<int> lattice_source;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto key = std::make_pair(static_cast<int>(std::llround(points[i].x() * scale)),
                                    static_cast<int>(std::llround(points[i].y() * scale)));
    auto [it, inserted] = first_at.emplace(key, static_cast<int>(i));
    result.representative[i] = it->second;
    if (inserted) {
      lattice.emplace_back(key.first, key.second);
      lattice_source.push_back(static_cast<int>(i));
    }
  }
  result.unique_points = lattice_source;
  if (lattice.size() < 3) return result;

  boost::polygon::voronoi_diagram<double> diagram;
  boost::polygon::construct_voronoi(lattice.begin(), lattice.end(), &diagram);

  std::vector<int> ring;
  for (const auto& vertex : diagram.vertices()) {
    ring.clear();
    const auto* edge = vertex.incident_edge();
    do {
      ring.push_back(static_cast<int>(edge->cell()->source_index()));
      edge = edge->rot_next();
    } while (edge != vertex.incident_edge());
    for (std::size_t k = 1; k + 1 < ring.size(); ++k) {
      int a = ring[0];
      int b = ring[k];
      int c = ring[k + 1];
      const long long o = orient(lattice[a], lattice[b], lattice[c]);
      if (o == 0) continue;
      if (o < 0) std::swap(b, c);
      result.triangles.push_back({lattice_source[a], lattice_source[b], lattice_source[c]});
    }
  }
  return result;
}

}  // namespace acetrec
