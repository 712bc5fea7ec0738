#include "acetrec/reconstruct.hpp"

#include "acetrec/errors.hpp"
#include "acetrec/json_codec.hpp"

#include <fmt/format.h>

#include <chrono>

namespace acetrec {

void ReconstructionConfig::validate() const {
  if (n_nodes < 4) throw ParameterError(fmt::format("n_nodes must be >= 4, got {}", n_nodes));
  if (m < 2 || m + 1 > n_nodes) throw ParameterError(fmt::format("m must lie in [2, n_nodes - 1], got {}", m));
  if (max_outer_iterations < 1) throw ParameterError("max_outer_iterations must be >= 1");
  if (max_recorrespondences < 1 || max_recorrespondences > 3) {
    throw ParameterError(fmt::format("max_recorrespondences must lie in [1, 3], got {}", max_recorrespondences));
  }
  if (recorrespond_threshold <= 0.0 && !(recorrespond_fraction > 0.0)) {
    throw ParameterError("recorrespondence threshold must be positive");
  }
  weights.validate();
  gn.validate();
  strategy.validate();
}

double mean_vertex_displacement(const Mesh& a, const Mesh& b) {
  if (a.vertices.size() != b.vertices.size()) throw ParameterError("meshes differ in vertex count");
  if (a.vertices.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.vertices.size(); ++i) sum += (a.vertices[i] - b.vertices[i]).norm();
  return sum / static_cast<double>(a.vertices.size());
}

CorrespondenceSet compute_correspondences(const Mesh& mesh, const Curve2D& observation, const View& view,
                                          int view_index, const ReconstructionConfig& cfg) {
  const ProjectedSet projected = project_vertices(mesh, view);
  const SilhouetteCurve silhouette =
      cfg.alpha > 0.0 ? extract_silhouette(projected, cfg.alpha) : extract_silhouette(projected);
  switch (cfg.strategy.tag) {
    case StrategyTag::Srvf: {
      const AlignmentResult alignment = elastic_align(silhouette.as_curve(), observation, cfg.elastic);
      return infer_correspondences(alignment, silhouette, observation, view_index);
    }
    case StrategyTag::Icp:
      return icp_correspondences(silhouette, observation, view_index);
    case StrategyTag::IcpNormVec:
      return normvec_correspondences(silhouette, observation, view_index, cfg.strategy.normal_angle_deg);
  }
  throw InternalError("unhandled correspondence strategy");
}

ReconstructionResult reconstruct(const Mesh& template_mesh, const std::vector<Curve2D>& observations,
                                 const std::vector<View>& views, const ReconstructionConfig& cfg,
                                 const IterationCallback& callback) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  cfg.validate();
  template_mesh.validate();
  if (views.size() < 3) throw ParameterError(fmt::format("reconstruction needs at least 3 views, got {}", views.size()));
  if (observations.size() != views.size()) {
    throw ParameterError(fmt::format("{} observation contours for {} views", observations.size(), views.size()));
  }
  for (const auto& v : views) v.validate();

  ReconstructionResult result;
  result.threshold_mm = cfg.recorrespond_threshold > 0.0
                            ? cfg.recorrespond_threshold
                            : cfg.recorrespond_fraction * bounding_box_diagonal(template_mesh);
  const bool per_iteration = cfg.strategy.tag != StrategyTag::Srvf;

  Mesh current = template_mesh;
  Mesh round_mesh = template_mesh;  // mesh the graph is bound to
  DeformationGraph graph;
  CorrespondenceSet corrs;
  bool need_correspondences = true;
  for (int outer = 0; outer < cfg.max_outer_iterations; ++outer) {
    OuterIterationLog log;
    log.iteration = outer;
    if (need_correspondences || per_iteration) {
      const auto t0 = clock::now();
      corrs = CorrespondenceSet{};
      for (std::size_t k = 0; k < views.size(); ++k) {
        corrs.append(compute_correspondences(current, observations[k], views[k], static_cast<int>(k), cfg));
      }
      result.correspondence_seconds += std::chrono::duration<double>(clock::now() - t0).count();
      ++result.recorrespondences;
      log.recorresponded = true;
      need_correspondences = false;
    }
    log.correspondences = static_cast<int>(corrs.size());

    const auto t0 = clock::now();
    if (cfg.reinitialize_every_iteration || log.recorresponded) {
      round_mesh = current;
      graph = build_graph(round_mesh, cfg.n_nodes, cfg.m);
    }
    const GaussNewtonResult gn = gauss_newton_solve(graph, round_mesh, corrs, views, cfg.weights, cfg.gn);
    graph = gn.graph;
    Mesh next = deform_mesh(round_mesh, graph);
    result.solve_seconds += std::chrono::duration<double>(clock::now() - t0).count();

    log.cost_before = gn.cost_trace.front();
    log.cost_after = gn.cost_trace.back();
    log.terms = energy_terms(graph, round_mesh, corrs, views, cfg.weights);
    log.gn_iterations = gn.iterations;
    log.mean_displacement = mean_vertex_displacement(current, next);
    result.cost_trace.insert(result.cost_trace.end(), gn.cost_trace.begin(), gn.cost_trace.end());
    result.gn_iterations += gn.iterations;
    result.final_cost = log.cost_after;
    result.final_terms = log.terms;
    result.outer.push_back(log);
    result.outer_iterations = outer + 1;
    current = std::move(next);
    if (callback) callback(log, current, corrs);

    if (log.mean_displacement < result.threshold_mm) {
      if (!per_iteration && result.recorrespondences < cfg.max_recorrespondences) {
        need_correspondences = true;
      } else {
        result.converged = true;
        break;
      }
    }
  }
  result.mesh = std::move(current);
  result.total_seconds = std::chrono::duration<double>(clock::now() - t_start).count();
  return result;
}

std::string reconstruction_report_json(const ReconstructionResult& result) {
  json doc;
  doc["converged"] = result.converged;
  doc["final_cost"] = result.final_cost;
  doc["final_terms"] = {{"rot", result.final_terms.rot}, {"reg", result.final_terms.reg}, {"obs", result.final_terms.obs}};
  doc["recorrespondences"] = result.recorrespondences;
  doc["outer_iterations"] = result.outer_iterations;
  doc["gn_iterations"] = result.gn_iterations;
  doc["recorrespond_threshold_mm"] = result.threshold_mm;
  doc["cost_trace"] = result.cost_trace;
  doc["outer"] = json::array();
  for (const auto& o : result.outer) {
    doc["outer"].push_back({{"iteration", o.iteration},
                            {"recorresponded", o.recorresponded},
                            {"correspondences", o.correspondences},
                            {"cost_before", o.cost_before},
                            {"cost_after", o.cost_after},
                            {"terms", {{"rot", o.terms.rot}, {"reg", o.terms.reg}, {"obs", o.terms.obs}}},
                            {"gn_iterations", o.gn_iterations},
                            {"mean_displacement_mm", o.mean_displacement}});
  }
  doc["timings_s"] = {{"correspondence", result.correspondence_seconds},
                      {"solve", result.solve_seconds},
                      {"total", result.total_seconds}};
  return doc.dump(2);
}

}  // namespace acetrec
