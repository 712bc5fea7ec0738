#pragma once

#include "acetrec/baselines.hpp"
#include "acetrec/energy.hpp"
#include "acetrec/gauss_newton.hpp"
#include "acetrec/srvf.hpp"

#include <functional>
#include <string>
#include <vector>

namespace acetrec {

struct ReconstructionConfig {
  int n_nodes = 64;
  int m = 4;
  int max_outer_iterations = 30;
  /// Mean per-vertex displacement (mm) below which the current correspondences
  /// are considered exhausted. <= 0 selects `recorrespond_fraction` of the
  /// template's bounding-box diagonal.
  double recorrespond_threshold = 0.0;
  double recorrespond_fraction = 0.005;
  /// Total SRVF correspondence rounds, in [1, 3].
  int max_recorrespondences = 3;
  /// Rebuild the deformation graph on the deformed mesh after every outer
  /// iteration. When false the graph is rebuilt only when correspondences
  /// are recomputed, and the solve in between keeps the round's prior.
  bool reinitialize_every_iteration = true;
  /// Alpha for silhouette extraction; <= 0 selects the per-view default.
  double alpha = 0.0;
  EnergyWeights weights;
  GaussNewtonConfig gn;
  ElasticConfig elastic;
  CorrespondenceStrategy strategy;

  void validate() const;
};

struct OuterIterationLog {
  int iteration = 0;
  bool recorresponded = false;
  int correspondences = 0;
  double cost_before = 0.0;
  double cost_after = 0.0;
  EnergyTerms terms;  ///< after the solve
  int gn_iterations = 0;
  double mean_displacement = 0.0;
};

struct ReconstructionResult {
  Mesh mesh;
  double final_cost = 0.0;
  EnergyTerms final_terms;
  /// Accepted-step costs of every GN solve, concatenated.
  std::vector<double> cost_trace;
  std::vector<OuterIterationLog> outer;
  int recorrespondences = 0;
  int outer_iterations = 0;
  int gn_iterations = 0;
  bool converged = false;
  double threshold_mm = 0.0;
  double correspondence_seconds = 0.0;
  double solve_seconds = 0.0;
  double total_seconds = 0.0;
};

/// Correspondences between the current mesh and one observed contour, for
/// the given strategy.
CorrespondenceSet compute_correspondences(const Mesh& mesh, const Curve2D& observation, const View& view,
                                          int view_index, const ReconstructionConfig& cfg);

/// Called after every outer iteration with its log and the deformed mesh.
using IterationCallback = std::function<void(const OuterIterationLog&, const Mesh&, const CorrespondenceSet&)>;

/// Deforms `template_mesh` until its silhouettes match `observations`
/// (one contour per view, same order as `views`).
ReconstructionResult reconstruct(const Mesh& template_mesh, const std::vector<Curve2D>& observations,
                                 const std::vector<View>& views, const ReconstructionConfig& cfg = {},
                                 const IterationCallback& callback = {});

/// Mean Euclidean distance between corresponding vertices.
double mean_vertex_displacement(const Mesh& a, const Mesh& b);

/// JSON report (cost trace, per-term costs, iterations, rounds, timings).
std::string reconstruction_report_json(const ReconstructionResult& result);

}  // namespace acetrec
