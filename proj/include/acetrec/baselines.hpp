#pragma once

#include "acetrec/correspondence.hpp"
#include "acetrec/mesh.hpp"

#include <string>
#include <vector>

namespace acetrec {

enum class StrategyTag { Srvf, Icp, IcpNormVec };

struct CorrespondenceStrategy {
  StrategyTag tag = StrategyTag::Srvf;
  /// Used by IcpNormVec only; (0, 90].
  double normal_angle_deg = 30.0;

  void validate() const;
};

std::string to_string(StrategyTag tag);
/// "srvf", "icp", "icp-normvec"; throws ParameterError otherwise.
StrategyTag parse_strategy(const std::string& name);

/// Each observation point paired with the source vertex of its nearest
/// silhouette point; equidistant ties go to the lower silhouette index.
CorrespondenceSet icp_correspondences(const SilhouetteCurve& silhouette, const Curve2D& obs, int view_index);

/// Unit normals (t.y, -t.x) from central-difference tangents, flipped to
/// point away from the curve centroid.
std::vector<Vec2> curve_normals(const std::vector<Vec2>& points, bool closed);

/// Angle in degrees between two unit vectors.
double normal_angle_deg(const Vec2& a, const Vec2& b);

/// icp_correspondences minus the pairs whose normals differ by more than
/// `angle_threshold_deg`.
CorrespondenceSet normvec_correspondences(const SilhouetteCurve& silhouette, const Curve2D& obs, int view_index,
                                          double angle_threshold_deg);

}  // namespace acetrec
