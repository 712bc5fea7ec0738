#include "acetrec/srvf.hpp"

#include "acetrec/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace acetrec {

double SrvfCurve::step() const {
  const auto n = static_cast<double>(samples.size());
  return closed ? 1.0 / n : 1.0 / (n - 1.0);
}

double SrvfCurve::weight(std::size_t i) const {
  const double h = step();
  if (closed) return h;
  return (i == 0 || i + 1 == samples.size()) ? 0.5 * h : h;
}

Mat2 rotation_2d(double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

SrvfCurve to_srvf(const Curve2D& curve) {
  const auto& c = curve.points;
  const std::size_t n = c.size();
  if (n < 8) throw DegenerateInputError(fmt::format("srvf needs at least 8 samples, got {}", n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!c[i].allFinite()) throw DegenerateInputError("srvf input has non-finite coordinates");
    const bool has_next = curve.closed || i + 1 < n;
    if (has_next && c[i] == c[(i + 1) % n]) {
      throw DegenerateInputError(fmt::format("repeated point at sample {} gives zero velocity", i));
    }
  }

  SrvfCurve q;
  q.closed = curve.closed;
  q.samples.resize(n);
  const double h = curve.closed ? 1.0 / static_cast<double>(n) : 1.0 / static_cast<double>(n - 1);

  std::vector<Vec2> velocity(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (curve.closed) {
      velocity[i] = (c[(i + 1) % n] - c[(i + n - 1) % n]) / (2.0 * h);
    } else if (i == 0) {
      velocity[i] = (c[1] - c[0]) / h;
    } else if (i + 1 == n) {
      velocity[i] = (c[n - 1] - c[n - 2]) / h;
    } else {
      velocity[i] = (c[i + 1] - c[i - 1]) / (2.0 * h);
    }
  }

  Vec2 centroid = Vec2::Zero();
  for (const auto& p : c) centroid += p;
  q.centroid = centroid / static_cast<double>(n);

  double length = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double speed = velocity[i].norm();
    if (!(speed > 0.0)) throw DegenerateInputError(fmt::format("zero velocity at sample {}", i));
    q.samples[i] = velocity[i] / std::sqrt(speed);
    length += speed * q.weight(i);
  }
  q.original_length = length;
  const double inv = 1.0 / std::sqrt(length);
  for (auto& s : q.samples) s *= inv;
  return q;
}

Curve2D from_srvf(const SrvfCurve& q, const Vec2& origin) {
  Curve2D out;
  out.closed = q.closed;
  const std::size_t n = q.size();
  out.points.reserve(n);
  if (n == 0) return out;
  const double h = q.step();
  Vec2 p = origin;
  out.points.push_back(p);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 a = q.samples[i] * q.samples[i].norm();
    const Vec2 b = q.samples[i + 1] * q.samples[i + 1].norm();
    p += 0.5 * h * (a + b);
    out.points.push_back(p);
  }
  return out;
}

namespace {

void require_compatible(const SrvfCurve& a, const SrvfCurve& b) {
  if (a.size() != b.size()) {
    throw ParameterError(fmt::format("srvf sample counts differ ({} vs {})", a.size(), b.size()));
  }
  if (a.closed != b.closed) throw ParameterError("cannot compare open and closed srvf curves");
}

Vec2 interpolate(const std::vector<Vec2>& samples, double x) {
  const auto last = static_cast<double>(samples.size() - 1);
  x = std::clamp(x, 0.0, last);
  const auto j = static_cast<std::size_t>(std::floor(x));
  if (j + 1 >= samples.size()) return samples.back();
  const double f = x - static_cast<double>(j);
  return (1.0 - f) * samples[j] + f * samples[j + 1];
}

// Visits obs samples of one lattice segment with their trapezoid weight and
// the warped (unrotated) model value sqrt(m) q_model(gamma(t_s)).
template <typename Fn>
void visit_segment(const SrvfCurve& model, const SrvfCurve& obs, std::pair<int, int> from,
                   std::pair<int, int> to, Fn&& fn) {
  const int a = from.first;
  const int b = to.first;
  const double slope = static_cast<double>(to.second - from.second) / static_cast<double>(b - a);
  const double root = std::sqrt(slope);
  const double h = obs.step();
  for (int s = a; s <= b; ++s) {
    const double w = (s == a || s == b) ? 0.5 * h : h;
    const double x = from.second + slope * (s - a);
    fn(w, obs.samples[static_cast<std::size_t>(s)], root * interpolate(model.samples, x));
  }
}

void check_path(const Reparam& gamma, std::size_t n) {
  if (gamma.knots.size() < 2 || gamma.knots.front() != std::make_pair(0, 0) ||
      gamma.knots.back() != std::make_pair(static_cast<int>(n) - 1, static_cast<int>(n) - 1)) {
    throw ParameterError("reparameterization knots must run from (0,0) to (n-1,n-1)");
  }
}

RotationEstimate rotation_from_cross(const Mat2& m) {
  RotationEstimate est;
  const double sin_part = m(0, 1) - m(1, 0);
  const double cos_part = m(0, 0) + m(1, 1);
  const double scale = m.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || std::hypot(sin_part, cos_part) <= 1e-14 * scale) {
    est.degenerate = true;
    return est;
  }
  est.rotation = rotation_2d(std::atan2(sin_part, cos_part));
  return est;
}

}  // namespace

double srvf_distance(const SrvfCurve& a, const SrvfCurve& b) {
  require_compatible(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a.weight(i) * (a.samples[i] - b.samples[i]).squaredNorm();
  return std::sqrt(sum);
}

SrvfCurve rotated(const SrvfCurve& q, const Mat2& rotation) {
  SrvfCurve out = q;
  for (auto& s : out.samples) s = rotation * s;
  return out;
}

Reparam Reparam::identity(int n) {
  Reparam r;
  r.knots = {{0, 0}, {n - 1, n - 1}};
  r.values.resize(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) r.values[static_cast<std::size_t>(s)] = static_cast<double>(s) / (n - 1);
  return r;
}

double Reparam::operator()(double t) const {
  if (values.empty()) return t;
  const auto last = static_cast<double>(values.size() - 1);
  const double x = std::clamp(t, 0.0, 1.0) * last;
  const auto j = static_cast<std::size_t>(std::floor(x));
  if (j + 1 >= values.size()) return values.back();
  const double f = x - static_cast<double>(j);
  return (1.0 - f) * values[j] + f * values[j + 1];
}

RotationEstimate optimal_rotation(const SrvfCurve& q_model, const SrvfCurve& q_obs) {
  require_compatible(q_model, q_obs);
  Mat2 m = Mat2::Zero();
  for (std::size_t i = 0; i < q_model.size(); ++i) {
    m += q_model.weight(i) * q_model.samples[i] * q_obs.samples[i].transpose();
  }
  return rotation_from_cross(m);
}

RotationEstimate optimal_rotation(const SrvfCurve& q_model, const SrvfCurve& q_obs, const Reparam& gamma) {
  require_compatible(q_model, q_obs);
  check_path(gamma, q_obs.size());
  Mat2 m = Mat2::Zero();
  for (std::size_t k = 0; k + 1 < gamma.knots.size(); ++k) {
    visit_segment(q_model, q_obs, gamma.knots[k], gamma.knots[k + 1],
                  [&](double w, const Vec2& obs, const Vec2& model) { m += w * model * obs.transpose(); });
  }
  return rotation_from_cross(m);
}

std::vector<std::pair<int, int>> default_slopes() {
  return {{1, 1}, {1, 2}, {2, 1}, {1, 3}, {3, 1}, {2, 3}, {3, 2}};
}

double segment_cost(const SrvfCurve& q_model, const SrvfCurve& q_obs, std::pair<int, int> from,
                    std::pair<int, int> to) {
  double cost = 0.0;
  visit_segment(q_model, q_obs, from, to,
                [&](double w, const Vec2& obs, const Vec2& model) { cost += w * (obs - model).squaredNorm(); });
  return cost;
}

double warp_cost(const SrvfCurve& q_model, const SrvfCurve& q_obs, const Reparam& gamma) {
  require_compatible(q_model, q_obs);
  check_path(gamma, q_obs.size());
  double cost = 0.0;
  for (std::size_t k = 0; k + 1 < gamma.knots.size(); ++k) {
    cost += segment_cost(q_model, q_obs, gamma.knots[k], gamma.knots[k + 1]);
  }
  return cost;
}

Reparam dp_reparameterize(const SrvfCurve& q_model, const SrvfCurve& q_obs, int grid,
                          const std::vector<std::pair<int, int>>& slopes) {
  require_compatible(q_model, q_obs);
  if (q_model.closed) throw ParameterError("dynamic programming needs open (unrolled) curves");
  const int n = static_cast<int>(q_obs.size());
  if (grid < 8) throw ParameterError(fmt::format("DP grid must be >= 8, got {}", grid));
  if (grid > n) throw ParameterError(fmt::format("DP grid {} exceeds sample count {}", grid, n));
  if (slopes.empty()) throw ParameterError("DP needs at least one slope");

  std::vector<int> pos(static_cast<std::size_t>(grid));
  for (int g = 0; g < grid; ++g) {
    pos[static_cast<std::size_t>(g)] =
        static_cast<int>(std::lround(static_cast<double>(g) * (n - 1) / static_cast<double>(grid - 1)));
  }

  const double inf = std::numeric_limits<double>::infinity();
  const auto cells = static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid);
  std::vector<double> cost(cells, inf);
  std::vector<int> parent(cells, -1);
  auto at = [grid](int i, int j) { return static_cast<std::size_t>(i) * static_cast<std::size_t>(grid) + j; };
  cost[0] = 0.0;

  for (int i = 1; i < grid; ++i) {
    for (int j = 1; j < grid; ++j) {
      double best = inf;
      int best_parent = -1;
      for (const auto& [di, dj] : slopes) {
        const int pi = i - di;
        const int pj = j - dj;
        if (pi < 0 || pj < 0) continue;
        const double base = cost[at(pi, pj)];
        if (base == inf) continue;
        const double c = base + segment_cost(q_model, q_obs, {pos[pi], pos[pj]}, {pos[i], pos[j]});
        if (c < best) {
          best = c;
          best_parent = static_cast<int>(at(pi, pj));
        }
      }
      cost[at(i, j)] = best;
      parent[at(i, j)] = best_parent;
    }
  }
  if (cost[at(grid - 1, grid - 1)] == inf) throw InternalError("DP lattice end is unreachable");

  Reparam gamma;
  for (int cell = static_cast<int>(at(grid - 1, grid - 1)); cell >= 0; cell = parent[static_cast<std::size_t>(cell)]) {
    const int i = cell / grid;
    const int j = cell % grid;
    gamma.knots.emplace_back(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)]);
    if (cell == 0) break;
  }
  std::reverse(gamma.knots.begin(), gamma.knots.end());

  gamma.values.resize(static_cast<std::size_t>(n));
  const double h = 1.0 / (n - 1);
  for (std::size_t k = 0; k + 1 < gamma.knots.size(); ++k) {
    const auto [a, l] = gamma.knots[k];
    const auto [b, r] = gamma.knots[k + 1];
    const double slope = static_cast<double>(r - l) / (b - a);
    for (int s = a; s <= b; ++s) gamma.values[static_cast<std::size_t>(s)] = (l + slope * (s - a)) * h;
  }
  return gamma;
}

}  // namespace acetrec
