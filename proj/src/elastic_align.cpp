#include "acetrec/errors.hpp"
#include "acetrec/srvf.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace acetrec {

namespace {

void validate(const ElasticConfig& cfg) {
  if (cfg.samples < 8) throw ParameterError(fmt::format("elastic samples must be >= 8, got {}", cfg.samples));
  if (cfg.grid < 8 || cfg.grid > cfg.samples) {
    throw ParameterError(fmt::format("elastic grid must lie in [8, {}], got {}", cfg.samples, cfg.grid));
  }
  if (cfg.max_rounds < 1) throw ParameterError("elastic max_rounds must be >= 1");
  if (cfg.start_stride < 1) throw ParameterError("elastic start_stride must be >= 1");
  if (!(cfg.tolerance >= 0.0)) throw ParameterError("elastic tolerance must be non-negative");
  if (!(cfg.smoothing >= 0.0 && cfg.smoothing < 0.5)) throw ParameterError("elastic smoothing must lie in [0, 0.5)");
  for (double f : cfg.window_fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ParameterError(fmt::format("window fraction {} outside (0, 1]", f));
  }
}

struct Candidate {
  ModelWindow window;
  SrvfCurve q_model;
  RotationEstimate rotation;
  Reparam gamma;
  double cost = std::numeric_limits<double>::infinity();
  double initial_cost = 0.0;
};

// One rotation -> warp -> rotation pass starting from the identity warp.
void first_round(Candidate& cand, const SrvfCurve& q_obs, const ElasticConfig& cfg) {
  const double d0 = srvf_distance(cand.q_model, q_obs);
  cand.initial_cost = d0 * d0;
  const RotationEstimate r0 = optimal_rotation(cand.q_model, q_obs);
  cand.gamma = dp_reparameterize(rotated(cand.q_model, r0.rotation), q_obs, cfg.grid);
  cand.rotation = optimal_rotation(cand.q_model, q_obs, cand.gamma);
  cand.cost = warp_cost(rotated(cand.q_model, cand.rotation.rotation), q_obs, cand.gamma);
}

std::vector<ModelWindow> candidate_windows(const Curve2D& model, const Curve2D& obs, const ElasticConfig& cfg) {
  std::vector<ModelWindow> windows;
  const double length = arc_length(model);
  if (!model.closed) {
    windows.push_back({0.0, 1.0, false});
    windows.push_back({length, 1.0, true});
    return windows;
  }
  std::vector<double> fractions = {1.0};
  std::vector<bool> directions;
  if (obs.closed) {
    const bool same_turn = (signed_area(model.points) >= 0.0) == (signed_area(obs.points) >= 0.0);
    directions.push_back(!same_turn);
  } else {
    fractions = cfg.window_fractions;
    if (fractions.empty()) fractions = {1.0};
    directions = {false, true};
  }
  const double step = length * cfg.start_stride / cfg.samples;
  for (double fraction : fractions) {
    for (bool reverse : directions) {
      for (int k = 0; k * step < length - 1e-12 * length; ++k) windows.push_back({k * step, fraction, reverse});
    }
  }
  return windows;
}

// Warped and rotated model SRVF on the obs grid (slope of the segment that
// starts at each sample; the last sample uses the final segment).
SrvfCurve warped_model(const SrvfCurve& q_model, const Reparam& gamma, const Mat2& rotation) {
  SrvfCurve out = q_model;
  const auto n = q_model.size();
  const double last = static_cast<double>(n - 1);
  for (std::size_t k = 0; k + 1 < gamma.knots.size(); ++k) {
    const auto [a, l] = gamma.knots[k];
    const auto [b, r] = gamma.knots[k + 1];
    const double slope = static_cast<double>(r - l) / (b - a);
    const bool final_segment = k + 2 == gamma.knots.size();
    for (int s = a; s < b || (final_segment && s == b); ++s) {
      const double x = std::clamp(gamma.values[static_cast<std::size_t>(s)] * last, 0.0, last);
      const auto j = std::min(static_cast<std::size_t>(std::floor(x)), n - 2);
      const double f = x - static_cast<double>(j);
      const Vec2 v = (1.0 - f) * q_model.samples[j] + f * q_model.samples[j + 1];
      out.samples[static_cast<std::size_t>(s)] = rotation * (std::sqrt(slope) * v);
    }
  }
  return out;
}

}  // namespace

Curve2D alignment_smoothed(const Curve2D& curve, double fraction) {
  return smooth_curve(curve, fraction * arc_length(curve));
}

AlignmentResult elastic_align(const Curve2D& raw_model, const Curve2D& raw_obs, const ElasticConfig& cfg) {
  validate(cfg);
  raw_model.validate();
  raw_obs.validate();
  const Curve2D model_curve = alignment_smoothed(raw_model, cfg.smoothing);
  const Curve2D obs_curve = alignment_smoothed(raw_obs, cfg.smoothing);
  const int n = cfg.samples;

  const Curve2D obs_open = cut_window(obs_curve, 0.0, 1.0, false, n);
  const SrvfCurve q_obs = to_srvf(obs_open);

  Candidate best;
  for (const auto& window : candidate_windows(model_curve, obs_curve, cfg)) {
    Candidate cand;
    cand.window = window;
    cand.q_model = to_srvf(cut_window(model_curve, window.start, window.fraction, window.reversed, n));
    first_round(cand, q_obs, cfg);
    if (cand.cost < best.cost) best = std::move(cand);
  }
  // Closed models: refine the winning start at unit stride.
  if (model_curve.closed && cfg.start_stride > 1) {
    const double unit = arc_length(model_curve) / n;
    const ModelWindow coarse = best.window;
    for (int k = 1 - cfg.start_stride; k < cfg.start_stride; ++k) {
      if (k == 0) continue;
      Candidate cand;
      cand.window = coarse;
      cand.window.start = coarse.start + k * unit;
      cand.q_model = to_srvf(cut_window(model_curve, cand.window.start, cand.window.fraction, cand.window.reversed, n));
      first_round(cand, q_obs, cfg);
      if (cand.cost < best.cost) best = std::move(cand);
    }
  }

  int rounds = 1;
  double cost = best.cost;
  while (rounds < cfg.max_rounds) {
    Reparam gamma = dp_reparameterize(rotated(best.q_model, best.rotation.rotation), q_obs, cfg.grid);
    RotationEstimate rot = optimal_rotation(best.q_model, q_obs, gamma);
    const double next = warp_cost(rotated(best.q_model, rot.rotation), q_obs, gamma);
    ++rounds;
    if (next > cost) break;
    const bool small = cost - next <= cfg.tolerance * std::max(cost, std::numeric_limits<double>::min());
    best.gamma = std::move(gamma);
    best.rotation = rot;
    cost = next;
    if (small) break;
  }

  AlignmentResult result;
  result.rotation = best.rotation.rotation;
  result.rotation_degenerate = best.rotation.degenerate;
  result.gamma = best.gamma;
  result.distance = std::sqrt(std::max(cost, 0.0));
  result.initial_distance = std::sqrt(best.initial_cost);
  result.rounds = rounds;
  result.window = best.window;
  result.smoothing = cfg.smoothing;

  // Back to observation pixels: unit shape scaled by the obs length and
  // centred on the obs centroid.
  const SrvfCurve warped = warped_model(best.q_model, best.gamma, best.rotation.rotation);
  Curve2D unit = from_srvf(warped, Vec2::Zero());
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : unit.points) centroid += p;
  centroid /= static_cast<double>(unit.points.size());
  for (auto& p : unit.points) p = q_obs.centroid + q_obs.original_length * (p - centroid);
  result.aligned_model_curve = std::move(unit);
  return result;
}

CorrespondenceSet infer_correspondences(const AlignmentResult& alignment, const SilhouetteCurve& silhouette,
                                        const Curve2D& obs, int view_index) {
  if (silhouette.points.empty() || silhouette.points.size() != silhouette.source_vertex.size()) {
    throw ParameterError("silhouette is empty or has mismatched source list");
  }
  obs.validate();
  const Curve2D model = alignment_smoothed(silhouette.as_curve(), alignment.smoothing);
  const auto model_cum = cumulative_arc_length(model);
  const double model_length = model_cum.back();
  const auto obs_cum = cumulative_arc_length(alignment_smoothed(obs, alignment.smoothing));
  const double obs_length = obs_cum.back();
  const std::size_t m = model.points.size();
  const auto& window = alignment.window;

  CorrespondenceSet out;
  out.items.reserve(obs.points.size());
  for (std::size_t i = 0; i < obs.points.size(); ++i) {
    const double u = obs_cum[i] / obs_length;
    const double tau = alignment.gamma(u);
    if (!(tau >= -1e-12 && tau <= 1.0 + 1e-12)) {
      throw InternalError(fmt::format("warped parameter {} for observation {} is outside [0, 1]", tau, i));
    }
    double pos = window.start + (window.reversed ? -1.0 : 1.0) * tau * window.fraction * model_length;

    std::size_t nearest = 0;
    if (model.closed) {
      pos = std::fmod(pos, model_length);
      if (pos < 0) pos += model_length;
      auto it = std::upper_bound(model_cum.begin(), model_cum.end(), pos);
      const auto hi = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - model_cum.begin(), 1));
      const std::size_t lo = hi - 1;
      nearest = (pos - model_cum[lo] <= model_cum[std::min(hi, m)] - pos) ? lo : hi % m;
    } else {
      pos = std::clamp(pos, 0.0, model_length);
      auto it = std::upper_bound(model_cum.begin(), model_cum.end(), pos);
      const auto hi = std::min(static_cast<std::size_t>(it - model_cum.begin()), m - 1);
      const std::size_t lo = hi == 0 ? 0 : hi - 1;
      nearest = (pos - model_cum[lo] <= model_cum[hi] - pos) ? lo : hi;
    }
    out.items.push_back({view_index, silhouette.source_vertex[nearest], obs.points[i]});
  }
  return out;
}

}  // namespace acetrec
