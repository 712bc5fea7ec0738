#pragma once

#include "acetrec/correspondence.hpp"
#include "acetrec/curve.hpp"
#include "acetrec/mesh.hpp"

#include <Eigen/Core>

#include <vector>

namespace acetrec {

using Mat2 = Eigen::Matrix2d;

/// Square-root velocity samples q(t_i) = c'(t_i) / sqrt(|c'(t_i)|) of a
/// centred, unit-length curve.
///
/// Open curves use t_i = i / (n - 1) with trapezoid weights; closed curves
/// use t_i = i / n with uniform periodic weights. The samples are scaled so
/// that the weighted sum of |q|^2 is exactly 1.
struct SrvfCurve {
  std::vector<Vec2> samples;
  Vec2 centroid = Vec2::Zero();
  double original_length = 0.0;
  bool closed = false;

  std::size_t size() const { return samples.size(); }
  double step() const;
  /// Quadrature weight of sample i.
  double weight(std::size_t i) const;
};

SrvfCurve to_srvf(const Curve2D& curve);

/// c(t) = origin + integral of q|q|, trapezoid rule. For closed input the
/// closing interval is not emitted.
Curve2D from_srvf(const SrvfCurve& q, const Vec2& origin);

/// Weighted L2 norm of q1 - q2 (equal sizes, same open/closed flag).
double srvf_distance(const SrvfCurve& a, const SrvfCurve& b);

/// Copy of q with every sample rotated.
SrvfCurve rotated(const SrvfCurve& q, const Mat2& rotation);

Mat2 rotation_2d(double radians);

/// Piecewise-linear warping t -> gamma(t) on the obs sample grid.
///
/// `knots` are the lattice path vertices as (obs sample index, model sample
/// index), starting at (0, 0) and ending at (n - 1, n - 1). `values[s]` is
/// gamma at obs parameter t_s.
struct Reparam {
  std::vector<std::pair<int, int>> knots;
  std::vector<double> values;

  static Reparam identity(int n);
  /// gamma(t) for t in [0, 1], linear between samples.
  double operator()(double t) const;
};

struct RotationEstimate {
  Mat2 rotation = Mat2::Identity();
  bool degenerate = false;
};

/// argmin over SO(2) of |O q_model - q_obs|^2 (identity warp).
RotationEstimate optimal_rotation(const SrvfCurve& q_model, const SrvfCurve& q_obs);
/// Same, with the model warped by gamma.
RotationEstimate optimal_rotation(const SrvfCurve& q_model, const SrvfCurve& q_obs, const Reparam& gamma);

/// The default lattice step set.
std::vector<std::pair<int, int>> default_slopes();

/// Squared cost |q_obs - (q_model o gamma) sqrt(gamma')|^2 of one straight
/// lattice segment between sample-index pairs (obs, model).
double segment_cost(const SrvfCurve& q_model, const SrvfCurve& q_obs, std::pair<int, int> from,
                    std::pair<int, int> to);

/// Sum of segment costs along gamma's knots.
double warp_cost(const SrvfCurve& q_model, const SrvfCurve& q_obs, const Reparam& gamma);

/// Optimal monotone lattice path by dynamic programming. Lattice vertex g
/// sits on sample round(g (n-1)/(grid-1)). Both curves must be open with
/// equal sample counts.
Reparam dp_reparameterize(const SrvfCurve& q_model, const SrvfCurve& q_obs, int grid,
                          const std::vector<std::pair<int, int>>& slopes = default_slopes());

struct ElasticConfig {
  int samples = 100;
  int grid = 100;
  int max_rounds = 10;
  double tolerance = 1e-6;
  /// Cyclic start stride, in resampled model points, for closed models.
  int start_stride = 5;
  /// Window lengths (fraction of the closed model loop) tried against an
  /// open observation. Closed observations always use the full loop.
  std::vector<double> window_fractions = {0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  /// Both curves are smoothed with a Gaussian of this width, as a fraction
  /// of their own arc length, before resampling (0 disables).
  double smoothing = 0.015;
};

/// Where on the model curve the matched window sits.
struct ModelWindow {
  double start = 0.0;     ///< arc-length position on the model curve (px)
  double fraction = 1.0;  ///< window length / model length
  bool reversed = false;
};

struct AlignmentResult {
  Mat2 rotation = Mat2::Identity();
  Reparam gamma;
  double distance = 0.0;
  double initial_distance = 0.0;  ///< before rotation and warping, same window
  int rounds = 0;
  bool rotation_degenerate = false;
  double smoothing = 0.0;  ///< as in ElasticConfig; reused to map points back
  ModelWindow window;
  /// Model window after rotation and warping, in observation pixels.
  Curve2D aligned_model_curve;
};

AlignmentResult elastic_align(const Curve2D& model_curve, const Curve2D& obs_curve,
                              const ElasticConfig& cfg = {});

/// Pre-alignment smoothing of a curve (width `fraction` of its arc length).
Curve2D alignment_smoothed(const Curve2D& curve, double fraction);

/// One correspondence per observation point, routed through gamma onto
/// the nearest silhouette sample (by arc length) of the aligned window.
CorrespondenceSet infer_correspondences(const AlignmentResult& alignment, const SilhouetteCurve& silhouette,
                                        const Curve2D& obs, int view_index);

}  // namespace acetrec
