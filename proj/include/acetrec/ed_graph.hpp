#pragma once

#include "acetrec/mesh.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace acetrec {

/// Per-node affine transform {A_j, t_j}.
struct NodeParams {
  Mat3 A = Mat3::Identity();
  Vec3 t = Vec3::Zero();
};

struct Binding {
  int node = 0;
  double weight = 0.0;
};

/// Embedded deformation graph over a bound mesh.
///
/// A vertex P_i moves to sum_j w_ij (A_j (P_i - g_j) + g_j + t_j) over its
/// `m` nearest nodes, with w_ij = 1 - |P_i - g_j| / d_max normalized to sum
/// to one (d_max: distance to the (m+1)-th nearest node).
struct DeformationGraph {
  std::vector<Vec3> nodes;
  std::vector<NodeParams> params;
  std::vector<std::vector<int>> neighbors;      ///< symmetric, sorted
  std::vector<std::vector<Binding>> bindings;   ///< one list of m per vertex
  int m = 4;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t parameter_count() const { return 12 * nodes.size(); }

  /// Weights nonnegative with unit sum, neighbor relation symmetric, indices in range.
  void validate() const;
};

/// Flat NodeParamVector: per node A row-major (9 entries) followed by t (3).
Eigen::VectorXd flatten_params(const DeformationGraph& graph);
void unflatten_params(DeformationGraph& graph, const Eigen::VectorXd& x);

/// Farthest-point sampling over mesh vertices, seeded at vertex 0; ties
/// (within 1e-9 relative) go to the lowest index. Returns vertex indices.
std::vector<int> farthest_point_sample(const std::vector<Vec3>& points, int count);

/// Pre-normalization weights 1 - d / d_max for the m nearest nodes of p,
/// nearest first.
std::vector<Binding> raw_binding_weights(const Vec3& p, const std::vector<Vec3>& nodes, int m);

DeformationGraph build_graph(const Mesh& mesh, int n_nodes, int m);

/// Applies the graph to the mesh it is bound to.
Mesh deform_mesh(const Mesh& mesh, const DeformationGraph& graph);

/// Position of one vertex under the graph.
Vec3 deform_vertex(const Vec3& p, const std::vector<Binding>& bindings, const DeformationGraph& graph);

/// Rebuilds nodes, neighborhoods and weights from the deformed shape and
/// resets every transform to identity.
DeformationGraph reinitialize(const DeformationGraph& graph, const Mesh& deformed_mesh);

/// Node params reproducing the rigid motion v -> R v + t exactly.
void set_rigid_params(DeformationGraph& graph, const Mat3& R, const Vec3& t);

/// JSON debug dump: nodes, neighbors, per-node params.
std::string graph_to_json(const DeformationGraph& graph);

}  // namespace acetrec
