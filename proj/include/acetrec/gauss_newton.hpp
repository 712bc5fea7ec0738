#pragma once

#include "acetrec/energy.hpp"

#include <vector>

namespace acetrec {

enum class LinearSolverKind { Auto, Dense, Sparse };

struct GaussNewtonConfig {
  int max_iterations = 20;
  /// Stop once an accepted step lowers the cost by less than this fraction.
  double tolerance = 1e-6;
  double lambda0 = 1e-4;
  double lambda_max = 1e8;
  LinearSolverKind solver = LinearSolverKind::Auto;
  /// Auto picks the dense solver up to this many graph nodes.
  int dense_node_limit = 128;

  void validate() const;
};

struct GaussNewtonResult {
  DeformationGraph graph;
  /// Cost at the start, then after every accepted step (strictly decreasing).
  std::vector<double> cost_trace;
  int iterations = 0;   ///< accepted steps
  int rejections = 0;
  bool converged = false;
  double lambda = 0.0;  ///< damping at exit
};

/// Levenberg-damped Gauss-Newton over the node parameters with the
/// correspondences held fixed: delta = -(J^T J + lambda I)^-1 J^T r,
/// lambda x10 on a rejected step and /10 on an accepted one.
/// Throws SolverStallError when lambda exceeds lambda_max without a
/// decrease and the current point is not already a numerical minimum.
GaussNewtonResult gauss_newton_solve(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                                     const std::vector<View>& views, const EnergyWeights& weights,
                                     const GaussNewtonConfig& cfg = {});

}  // namespace acetrec
