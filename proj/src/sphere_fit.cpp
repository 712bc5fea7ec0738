#include "acetrec/sphere_fit.hpp"

#include "acetrec/errors.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <cmath>

namespace acetrec {

SphereFit fit_sphere(const std::vector<Vec3>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (n < 4) throw FitError(fmt::format("sphere fit needs at least 4 points, got {}", n));

  // Centre the data first so the linear system is well scaled.
  Vec3 mean = Vec3::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(n);
  double spread = 0.0;
  for (const auto& p : points) spread = std::max(spread, (p - mean).norm());
  if (!(spread > 0.0)) throw FitError("sphere fit on coincident points");

  Eigen::MatrixXd A(n, 4);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 q = (points[static_cast<std::size_t>(i)] - mean) / spread;
    A.row(i) << 2.0 * q.x(), 2.0 * q.y(), 2.0 * q.z(), 1.0;
    b[i] = q.squaredNorm();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv[3] > 1e-9 * sv[0])) throw FitError("sphere fit on coplanar or degenerate points");
  const Eigen::Vector4d sol = svd.solve(b);

  Vec3 c = sol.head<3>();
  const double r2 = sol[3] + c.squaredNorm();
  if (!(r2 > 0.0)) throw FitError("algebraic sphere fit produced a non-positive radius");
  double r = std::sqrt(r2);

  // Geometric refinement in the normalized frame.
  SphereFit fit;
  for (int it = 0; it < 50; ++it) {
    Eigen::Matrix4d H = Eigen::Matrix4d::Zero();
    Eigen::Vector4d g = Eigen::Vector4d::Zero();
    for (const auto& p : points) {
      const Vec3 d = (p - mean) / spread - c;
      const double len = d.norm();
      if (!(len > 0.0)) continue;
      Eigen::Vector4d j;
      j << -d / len, -1.0;
      const double res = len - r;
      H += j * j.transpose();
      g += j * res;
    }
    const Eigen::Vector4d step = H.ldlt().solve(-g);
    if (!step.allFinite()) break;
    c += step.head<3>();
    r += step[3];
    ++fit.refinement_iterations;
    if (step.norm() < 1e-13 * (1.0 + r)) break;
  }
  if (!(r > 0.0)) throw FitError("sphere refinement produced a non-positive radius");

  fit.center = mean + spread * c;
  fit.radius = spread * r;
  double ss = 0.0;
  for (const auto& p : points) ss += std::pow((p - fit.center).norm() - fit.radius, 2);
  fit.rms = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

double estimate_cup_diameter(const Mesh& mesh) { return 2.0 * fit_sphere(mesh.vertices).radius; }

}  // namespace acetrec
