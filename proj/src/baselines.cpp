#include "acetrec/baselines.hpp"

#include "acetrec/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace acetrec {

void CorrespondenceStrategy::validate() const {
  if (tag == StrategyTag::IcpNormVec && !(normal_angle_deg > 0.0 && normal_angle_deg <= 90.0)) {
    throw ParameterError(fmt::format("normal angle threshold {} outside (0, 90]", normal_angle_deg));
  }
}

std::string to_string(StrategyTag tag) {
  switch (tag) {
    case StrategyTag::Srvf: return "srvf";
    case StrategyTag::Icp: return "icp";
    case StrategyTag::IcpNormVec: return "icp-normvec";
  }
  return "unknown";
}

StrategyTag parse_strategy(const std::string& name) {
  if (name == "srvf") return StrategyTag::Srvf;
  if (name == "icp") return StrategyTag::Icp;
  if (name == "icp-normvec" || name == "icp_normvec" || name == "normvec") return StrategyTag::IcpNormVec;
  throw ParameterError(fmt::format("unknown strategy '{}' (expected srvf, icp or icp-normvec)", name));
}

namespace {

void check_inputs(const SilhouetteCurve& silhouette, const Curve2D& obs) {
  if (silhouette.points.empty()) throw DegenerateInputError("silhouette is empty");
  if (silhouette.points.size() != silhouette.source_vertex.size()) {
    throw ParameterError("silhouette points and source vertices differ in length");
  }
  if (obs.points.empty()) throw DegenerateInputError("observation curve is empty");
}

std::size_t nearest_index(const std::vector<Vec2>& points, const Vec2& p) {
  std::size_t best = 0;
  double best_d = (points[0] - p).squaredNorm();
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double d = (points[i] - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

CorrespondenceSet icp_correspondences(const SilhouetteCurve& silhouette, const Curve2D& obs, int view_index) {
  check_inputs(silhouette, obs);
  CorrespondenceSet out;
  out.items.reserve(obs.points.size());
  for (const auto& p : obs.points) {
    const std::size_t j = nearest_index(silhouette.points, p);
    out.items.push_back({view_index, silhouette.source_vertex[j], p});
  }
  return out;
}

std::vector<Vec2> curve_normals(const std::vector<Vec2>& points, bool closed) {
  const std::size_t n = points.size();
  if (n < 3) throw DegenerateInputError(fmt::format("normals need at least 3 points, got {}", n));
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(n);

  std::vector<Vec2> normals(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 t;
    if (closed) {
      t = points[(i + 1) % n] - points[(i + n - 1) % n];
    } else if (i == 0) {
      t = points[1] - points[0];
    } else if (i + 1 == n) {
      t = points[n - 1] - points[n - 2];
    } else {
      t = points[i + 1] - points[i - 1];
    }
    Vec2 normal(t.y(), -t.x());
    const Vec2 radial = points[i] - centroid;
    if (normal.squaredNorm() == 0.0) normal = radial;
    if (normal.squaredNorm() == 0.0) normal = Vec2::UnitX();
    if (normal.dot(radial) < 0.0) normal = -normal;
    normals[i] = normal.normalized();
  }
  return normals;
}

double normal_angle_deg(const Vec2& a, const Vec2& b) {
  const double cross = a.x() * b.y() - a.y() * b.x();
  return std::abs(std::atan2(cross, a.dot(b))) * 180.0 / std::numbers::pi;
}

CorrespondenceSet normvec_correspondences(const SilhouetteCurve& silhouette, const Curve2D& obs, int view_index,
                                          double angle_threshold_deg) {
  check_inputs(silhouette, obs);
  if (!(angle_threshold_deg > 0.0 && angle_threshold_deg <= 90.0)) {
    throw ParameterError(fmt::format("normal angle threshold {} outside (0, 90]", angle_threshold_deg));
  }
  const auto sil_normals = curve_normals(silhouette.points, silhouette.closed);
  const auto obs_normals = curve_normals(obs.points, obs.closed);
  CorrespondenceSet out;
  for (std::size_t i = 0; i < obs.points.size(); ++i) {
    const std::size_t j = nearest_index(silhouette.points, obs.points[i]);
    if (normal_angle_deg(sil_normals[j], obs_normals[i]) <= angle_threshold_deg) {
      out.items.push_back({view_index, silhouette.source_vertex[j], obs.points[i]});
    }
  }
  return out;
}

}  // namespace acetrec
