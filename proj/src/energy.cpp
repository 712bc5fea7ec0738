#include "acetrec/energy.hpp"

#include "acetrec/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace acetrec {

void EnergyWeights::validate() const {
  if (!(w_rot >= 0.0) || !(w_reg >= 0.0) || !(w_obs >= 0.0)) {
    throw ParameterError(fmt::format("energy weights must be nonnegative ({}, {}, {})", w_rot, w_reg, w_obs));
  }
  if (w_rot == 0.0 && w_reg == 0.0 && w_obs == 0.0) throw ParameterError("energy weights are all zero");
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Parameter column of A_j(r, c) and t_j(r).
inline int col_A(int j, int r, int c) { return 12 * j + 3 * r + c; }
inline int col_t(int j, int r) { return 12 * j + 9 + r; }

std::size_t directed_pair_count(const DeformationGraph& graph) {
  std::size_t n = 0;
  for (const auto& list : graph.neighbors) n += list.size();
  return n;
}

// Correspondence positions sorted by view, stable within a view.
std::vector<int> obs_order(const CorrespondenceSet& corrs, const std::vector<View>& views,
                           const DeformationGraph& graph, const Mesh& mesh) {
  std::vector<int> order(corrs.items.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& c = corrs.items[i];
    if (c.view < 0 || static_cast<std::size_t>(c.view) >= views.size()) {
      throw ParameterError(fmt::format("correspondence {} names view {} of {}", i, c.view, views.size()));
    }
    if (c.vertex < 0 || static_cast<std::size_t>(c.vertex) >= mesh.vertices.size() ||
        static_cast<std::size_t>(c.vertex) >= graph.bindings.size()) {
      throw ParameterError(fmt::format("correspondence {} names vertex {} outside the mesh", i, c.vertex));
    }
    order[i] = static_cast<int>(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return corrs.items[a].view < corrs.items[b].view; });
  return order;
}

void rot_block(const DeformationGraph& graph, double s, Eigen::VectorXd& r, int row0, Triplets* trip) {
  for (std::size_t jj = 0; jj < graph.nodes.size(); ++jj) {
    const int j = static_cast<int>(jj);
    const Mat3& A = graph.params[jj].A;
    const int row = row0 + 6 * j;
    const Vec3 c0 = A.col(0), c1 = A.col(1), c2 = A.col(2);
    r[row + 0] = s * c0.dot(c1);
    r[row + 1] = s * c0.dot(c2);
    r[row + 2] = s * c1.dot(c2);
    r[row + 3] = s * (c0.dot(c0) - 1.0);
    r[row + 4] = s * (c1.dot(c1) - 1.0);
    r[row + 5] = s * (c2.dot(c2) - 1.0);
    if (!trip) continue;
    for (int k = 0; k < 3; ++k) {
      // d(ci . cl) / dA(k, i) = A(k, l)
      trip->emplace_back(row + 0, col_A(j, k, 0), s * A(k, 1));
      trip->emplace_back(row + 0, col_A(j, k, 1), s * A(k, 0));
      trip->emplace_back(row + 1, col_A(j, k, 0), s * A(k, 2));
      trip->emplace_back(row + 1, col_A(j, k, 2), s * A(k, 0));
      trip->emplace_back(row + 2, col_A(j, k, 1), s * A(k, 2));
      trip->emplace_back(row + 2, col_A(j, k, 2), s * A(k, 1));
      trip->emplace_back(row + 3, col_A(j, k, 0), s * 2.0 * A(k, 0));
      trip->emplace_back(row + 4, col_A(j, k, 1), s * 2.0 * A(k, 1));
      trip->emplace_back(row + 5, col_A(j, k, 2), s * 2.0 * A(k, 2));
    }
  }
}

void reg_block(const DeformationGraph& graph, double s, Eigen::VectorXd& r, int row0, Triplets* trip) {
  int row = row0;
  for (std::size_t jj = 0; jj < graph.nodes.size(); ++jj) {
    const int j = static_cast<int>(jj);
    const Vec3& gj = graph.nodes[jj];
    const auto& pj = graph.params[jj];
    for (int k : graph.neighbors[jj]) {
      const auto kk = static_cast<std::size_t>(k);
      const Vec3 d = graph.nodes[kk] - gj;
      r.segment<3>(row) = s * (pj.A * d + gj + pj.t - (graph.nodes[kk] + graph.params[kk].t));
      if (trip) {
        for (int a = 0; a < 3; ++a) {
          for (int c = 0; c < 3; ++c) trip->emplace_back(row + a, col_A(j, a, c), s * d[c]);
          trip->emplace_back(row + a, col_t(j, a), s);
          trip->emplace_back(row + a, col_t(k, a), -s);
        }
      }
      row += 3;
    }
  }
}

void obs_block(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
               const std::vector<View>& views, double s, bool per_view, Eigen::VectorXd& r, int row0,
               Triplets* trip) {
  const auto order = obs_order(corrs, views, graph, mesh);
  std::vector<int> per_view_count(views.size(), 0);
  for (const auto& c : corrs.items) ++per_view_count[static_cast<std::size_t>(c.view)];

  int row = row0;
  for (int idx : order) {
    const auto& c = corrs.items[static_cast<std::size_t>(idx)];
    const View& view = views[static_cast<std::size_t>(c.view)];
    const Vec3& P = mesh.vertices[static_cast<std::size_t>(c.vertex)];
    const auto& bind = graph.bindings[static_cast<std::size_t>(c.vertex)];
    const Vec3 moved = deform_vertex(P, bind, graph);
    const Vec3 h = view.K * (view.R * moved + view.t);
    if (!(view.depth(moved) > 0.0) || !(h.z() > 0.0)) {
      throw ProjectionError(
          fmt::format("correspondence {} (view {}, vertex {}) has non-positive depth", idx, c.view, c.vertex), idx);
    }
    const double sv = per_view ? s / std::sqrt(static_cast<double>(per_view_count[static_cast<std::size_t>(c.view)]))
                               : s;
    r[row] = sv * (h.x() / h.z() - c.point.x());
    r[row + 1] = sv * (h.y() / h.z() - c.point.y());
    if (trip) {
      Eigen::Matrix<double, 2, 3> dpi;
      dpi << 1.0 / h.z(), 0.0, -h.x() / (h.z() * h.z()), 0.0, 1.0 / h.z(), -h.y() / (h.z() * h.z());
      const Eigen::Matrix<double, 2, 3> D = sv * dpi * view.K * view.R;  // d residual / d moved
      for (const auto& b : bind) {
        const Vec3 arm = P - graph.nodes[static_cast<std::size_t>(b.node)];
        for (int a = 0; a < 2; ++a) {
          for (int q = 0; q < 3; ++q) {
            const double dq = b.weight * D(a, q);
            trip->emplace_back(row + a, col_t(b.node, q), dq);
            for (int cc = 0; cc < 3; ++cc) trip->emplace_back(row + a, col_A(b.node, q, cc), dq * arm[cc]);
          }
        }
      }
    }
    row += 2;
  }
}

}  // namespace

Eigen::VectorXd residuals_rot(const DeformationGraph& graph) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(6 * graph.nodes.size()));
  rot_block(graph, 1.0, r, 0, nullptr);
  return r;
}

Eigen::VectorXd residuals_reg(const DeformationGraph& graph) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(3 * directed_pair_count(graph)));
  reg_block(graph, 1.0, r, 0, nullptr);
  return r;
}

Eigen::VectorXd residuals_obs(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                              const std::vector<View>& views) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(2 * corrs.size()));
  obs_block(graph, mesh, corrs, views, 1.0, false, r, 0, nullptr);
  return r;
}

void linearize(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
               const std::vector<View>& views, const EnergyWeights& weights, Eigen::VectorXd& residual,
               Eigen::SparseMatrix<double>* J) {
  weights.validate();
  const int n_rot = static_cast<int>(6 * graph.nodes.size());
  const int n_reg = static_cast<int>(3 * directed_pair_count(graph));
  const int n_obs = static_cast<int>(2 * corrs.size());
  residual.resize(n_rot + n_reg + n_obs);

  Triplets trip;
  Triplets* tp = nullptr;
  if (J) {
    trip.reserve(static_cast<std::size_t>(54) * graph.nodes.size() + static_cast<std::size_t>(n_reg) * 5 +
                 static_cast<std::size_t>(n_obs) * 12 * static_cast<std::size_t>(graph.m));
    tp = &trip;
  }
  rot_block(graph, std::sqrt(weights.w_rot), residual, 0, tp);
  reg_block(graph, std::sqrt(weights.w_reg), residual, n_rot, tp);
  obs_block(graph, mesh, corrs, views, std::sqrt(weights.w_obs), weights.normalize_per_view, residual,
            n_rot + n_reg, tp);
  if (J) {
    J->resize(residual.size(), static_cast<Eigen::Index>(graph.parameter_count()));
    J->setFromTriplets(trip.begin(), trip.end());
  }
}

Eigen::VectorXd stacked_residuals(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                                  const std::vector<View>& views, const EnergyWeights& weights) {
  Eigen::VectorXd r;
  linearize(graph, mesh, corrs, views, weights, r, nullptr);
  return r;
}

Eigen::SparseMatrix<double> jacobian(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                                     const std::vector<View>& views, const EnergyWeights& weights) {
  Eigen::VectorXd r;
  Eigen::SparseMatrix<double> J;
  linearize(graph, mesh, corrs, views, weights, r, &J);
  return J;
}

EnergyTerms energy_terms(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                         const std::vector<View>& views, const EnergyWeights& weights) {
  const Eigen::VectorXd r = stacked_residuals(graph, mesh, corrs, views, weights);
  const auto n_rot = static_cast<Eigen::Index>(6 * graph.nodes.size());
  const auto n_reg = static_cast<Eigen::Index>(3 * directed_pair_count(graph));
  EnergyTerms terms;
  terms.rot = r.head(n_rot).squaredNorm();
  terms.reg = r.segment(n_rot, n_reg).squaredNorm();
  terms.obs = r.tail(r.size() - n_rot - n_reg).squaredNorm();
  return terms;
}

double total_cost(const DeformationGraph& graph, const Mesh& mesh, const CorrespondenceSet& corrs,
                  const std::vector<View>& views, const EnergyWeights& weights) {
  return stacked_residuals(graph, mesh, corrs, views, weights).squaredNorm();
}

}  // namespace acetrec
