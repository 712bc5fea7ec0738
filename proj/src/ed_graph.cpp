#include "acetrec/ed_graph.hpp"

#include "acetrec/errors.hpp"
#include "acetrec/json_codec.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace acetrec {

void DeformationGraph::validate() const {
  const auto n = static_cast<int>(nodes.size());
  if (params.size() != nodes.size() || neighbors.size() != nodes.size()) {
    throw ParameterError("graph node, param and neighbor lists differ in length");
  }
  for (int j = 0; j < n; ++j) {
    if (neighbors[j].empty()) throw ParameterError(fmt::format("node {} has no neighbor", j));
    for (int k : neighbors[j]) {
      if (k < 0 || k >= n || k == j) throw ParameterError(fmt::format("node {} has invalid neighbor {}", j, k));
      if (!std::binary_search(neighbors[k].begin(), neighbors[k].end(), j)) {
        throw ParameterError(fmt::format("neighbor relation {} -> {} is not symmetric", j, k));
      }
    }
  }
  for (std::size_t i = 0; i < bindings.size(); ++i) {
    double sum = 0.0;
    for (const auto& b : bindings[i]) {
      if (b.node < 0 || b.node >= n) throw ParameterError(fmt::format("vertex {} binds to invalid node", i));
      if (b.weight < 0.0) throw ParameterError(fmt::format("vertex {} has a negative weight", i));
      sum += b.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ParameterError(fmt::format("vertex {} weights sum to {}", i, sum));
  }
}

Eigen::VectorXd flatten_params(const DeformationGraph& graph) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(graph.parameter_count()));
  for (std::size_t j = 0; j < graph.params.size(); ++j) {
    const auto base = static_cast<Eigen::Index>(12 * j);
    const auto& p = graph.params[j];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) x[base + 3 * r + c] = p.A(r, c);
    }
    x.segment<3>(base + 9) = p.t;
  }
  return x;
}

void unflatten_params(DeformationGraph& graph, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != graph.parameter_count()) {
    throw ParameterError(fmt::format("parameter vector has length {}, expected {}", x.size(), graph.parameter_count()));
  }
  for (std::size_t j = 0; j < graph.params.size(); ++j) {
    const auto base = static_cast<Eigen::Index>(12 * j);
    auto& p = graph.params[j];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) p.A(r, c) = x[base + 3 * r + c];
    }
    p.t = x.segment<3>(base + 9);
  }
}

std::vector<int> farthest_point_sample(const std::vector<Vec3>& points, int count) {
  const auto n = static_cast<int>(points.size());
  if (count < 1 || count > n) throw ParameterError(fmt::format("cannot sample {} of {} points", count, n));
  std::vector<int> chosen = {0};
  std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  while (static_cast<int>(chosen.size()) < count) {
    const Vec3& last = points[static_cast<std::size_t>(chosen.back())];
    double far = -1.0;
    for (int i = 0; i < n; ++i) {
      auto& d = dist[static_cast<std::size_t>(i)];
      d = std::min(d, (points[static_cast<std::size_t>(i)] - last).norm());
      far = std::max(far, d);
    }
    const double cutoff = far * (1.0 - 1e-9);
    for (int i = 0; i < n; ++i) {
      if (dist[static_cast<std::size_t>(i)] >= cutoff) {
        chosen.push_back(i);
        break;
      }
    }
  }
  return chosen;
}

namespace {

// Indices of the k nearest nodes to p, nearest first; exact ties by index.
std::vector<int> nearest_nodes(const Vec3& p, const std::vector<Vec3>& nodes, int k, int skip = -1) {
  std::vector<std::pair<double, int>> order;
  order.reserve(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (static_cast<int>(j) == skip) continue;
    order.emplace_back((nodes[j] - p).norm(), static_cast<int>(j));
  }
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end());
  std::vector<int> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(order[i].second);
  return out;
}

}  // namespace

std::vector<Binding> raw_binding_weights(const Vec3& p, const std::vector<Vec3>& nodes, int m) {
  if (m < 1 || static_cast<std::size_t>(m) + 1 > nodes.size()) {
    throw ParameterError(fmt::format("need m + 1 <= node count (m = {}, nodes = {})", m, nodes.size()));
  }
  const auto near = nearest_nodes(p, nodes, m + 1);
  const double d_max = (nodes[static_cast<std::size_t>(near.back())] - p).norm();
  std::vector<Binding> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const int j = near[static_cast<std::size_t>(k)];
    const double d = (nodes[static_cast<std::size_t>(j)] - p).norm();
    out.push_back({j, d_max > 0.0 ? std::max(0.0, 1.0 - d / d_max) : 0.0});
  }
  return out;
}

DeformationGraph build_graph(const Mesh& mesh, int n_nodes, int m) {
  const auto nv = static_cast<int>(mesh.vertices.size());
  if (m < 2) throw ParameterError(fmt::format("graph needs m >= 2, got {}", m));
  if (n_nodes < 4) throw ParameterError(fmt::format("graph needs at least 4 nodes, got {}", n_nodes));
  if (n_nodes > nv) throw ParameterError(fmt::format("{} nodes requested from {} vertices", n_nodes, nv));
  if (m + 1 > n_nodes) throw ParameterError(fmt::format("m + 1 = {} exceeds node count {}", m + 1, n_nodes));

  DeformationGraph graph;
  graph.m = m;
  for (int v : farthest_point_sample(mesh.vertices, n_nodes)) graph.nodes.push_back(mesh.vertices[static_cast<std::size_t>(v)]);
  graph.params.assign(graph.nodes.size(), NodeParams{});

  graph.neighbors.assign(graph.nodes.size(), {});
  for (int j = 0; j < n_nodes; ++j) {
    for (int k : nearest_nodes(graph.nodes[static_cast<std::size_t>(j)], graph.nodes, m, j)) {
      graph.neighbors[static_cast<std::size_t>(j)].push_back(k);
      graph.neighbors[static_cast<std::size_t>(k)].push_back(j);
    }
  }
  for (auto& list : graph.neighbors) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }

  graph.bindings.resize(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    auto raw = raw_binding_weights(mesh.vertices[i], graph.nodes, m);
    double sum = 0.0;
    for (const auto& b : raw) sum += b.weight;
    for (auto& b : raw) b.weight = sum > 0.0 ? b.weight / sum : 1.0 / m;
    graph.bindings[i] = std::move(raw);
  }
  return graph;
}

Vec3 deform_vertex(const Vec3& p, const std::vector<Binding>& bindings, const DeformationGraph& graph) {
  Vec3 out = Vec3::Zero();
  for (const auto& b : bindings) {
    const auto j = static_cast<std::size_t>(b.node);
    const Vec3& g = graph.nodes[j];
    out += b.weight * (graph.params[j].A * (p - g) + g + graph.params[j].t);
  }
  return out;
}

Mesh deform_mesh(const Mesh& mesh, const DeformationGraph& graph) {
  if (graph.bindings.size() != mesh.vertices.size()) {
    throw ParameterError(fmt::format("graph binds {} vertices but mesh has {}", graph.bindings.size(),
                                     mesh.vertices.size()));
  }
  Mesh out;
  out.faces = mesh.faces;
  out.vertices.resize(mesh.vertices.size());
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    out.vertices[i] = deform_vertex(mesh.vertices[i], graph.bindings[i], graph);
  }
  return out;
}

DeformationGraph reinitialize(const DeformationGraph& graph, const Mesh& deformed_mesh) {
  return build_graph(deformed_mesh, static_cast<int>(graph.node_count()), graph.m);
}

void set_rigid_params(DeformationGraph& graph, const Mat3& R, const Vec3& t) {
  for (std::size_t j = 0; j < graph.nodes.size(); ++j) {
    graph.params[j].A = R;
    graph.params[j].t = R * graph.nodes[j] - graph.nodes[j] + t;
  }
}

std::string graph_to_json(const DeformationGraph& graph) {
  json doc;
  doc["m"] = graph.m;
  doc["nodes"] = json::array();
  doc["neighbors"] = graph.neighbors;
  doc["params"] = json::array();
  for (std::size_t j = 0; j < graph.nodes.size(); ++j) {
    doc["nodes"].push_back(vec3_to_json(graph.nodes[j]));
    doc["params"].push_back({{"A", mat3_to_json(graph.params[j].A)}, {"t", vec3_to_json(graph.params[j].t)}});
  }
  return doc.dump(2);
}

}  // namespace acetrec
