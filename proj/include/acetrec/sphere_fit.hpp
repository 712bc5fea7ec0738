#pragma once

#include "acetrec/mesh.hpp"

#include <vector>

namespace acetrec {

struct SphereFit {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double rms = 0.0;  ///< RMS of |p - c| - r
  int refinement_iterations = 0;
};

/// Linear algebraic fit |p|^2 = 2 c.p + d, then Gauss-Newton on the
/// geometric residuals |p - c| - r. Throws FitError for fewer than 4 points
/// or (near-)coplanar input.
SphereFit fit_sphere(const std::vector<Vec3>& points);

/// Cup size: diameter of the sphere fitted to the mesh vertices.
double estimate_cup_diameter(const Mesh& mesh);

}  // namespace acetrec
