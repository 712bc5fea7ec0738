#pragma once

#include "acetrec/correspondence.hpp"
#include "acetrec/ed_graph.hpp"
#include "acetrec/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

namespace acetrec {

struct EnergyWeights {
  double w_rot = 1.0;
  double w_reg = 10.0;
  double w_obs = 100.0;
  /// Scale each view's observation rows by 1/sqrt(|N(k)|), so the data term
  /// does not grow with contour sampling density.
  bool normalize_per_view = true;

  void validate() const;
};

// Residual blocks, unweighted. `mesh` is the mesh the graph is bound to.
Eigen::VectorXd residuals_rot(const DeformationGraph& graph);
Eigen::VectorXd residuals_reg(const DeformationGraph& graph);
/// Ordered by view, then by position within the set. Throws ProjectionError
/// carrying the correspondence's position in `corrs.items`.
Eigen::VectorXd residuals_obs(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                              const std::vector<View>& views);

struct EnergyTerms {
  double rot = 0.0;  ///< weighted
  double reg = 0.0;
  double obs = 0.0;
  double total() const { return rot + reg + obs; }
};

EnergyTerms energy_terms(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                         const std::vector<View>& views, const EnergyWeights& weights);

double total_cost(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                  const std::vector<View>& views, const EnergyWeights& weights);

/// Weighted stacked residual [sqrt(w_rot) r_rot; sqrt(w_reg) r_reg; sqrt(w_obs) r_obs];
/// its squared norm is total_cost.
Eigen::VectorXd stacked_residuals(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                                  const std::vector<View>& views, const EnergyWeights& weights);

/// Analytic Jacobian of stacked_residuals over the flat node parameters.
Eigen::SparseMatrix<double> jacobian(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                                     const std::vector<View>& views, const EnergyWeights& weights);

/// Residual and Jacobian in one pass.
void linearize(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
               const std::vector<View>& views, const EnergyWeights& weights, Eigen::VectorXd& residual,
               Eigen::SparseMatrix<double>* J);

}  // namespace acetrec
