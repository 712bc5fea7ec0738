#include "acetrec/curve.hpp"

#include "acetrec/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace acetrec {

void Curve2D::validate() const {
  if (points.size() < 2) {
    throw DegenerateInputError(fmt::format("curve needs at least 2 points, got {}", points.size()));
  }
  for (const auto& p : points) {
    if (!p.allFinite()) throw DegenerateInputError("curve has non-finite coordinates");
  }
  if (!(arc_length(*this) > 0.0)) throw DegenerateInputError("curve has zero arc length");
}

double arc_length(const Curve2D& curve) {
  const auto& pts = curve.points;
  if (pts.size() < 2) return 0.0;
  double length = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) length += (pts[i] - pts[i - 1]).norm();
  if (curve.closed) length += (pts.front() - pts.back()).norm();
  return length;
}

std::vector<double> cumulative_arc_length(const Curve2D& curve) {
  const auto& pts = curve.points;
  std::vector<double> cum(pts.size() + (curve.closed ? 1 : 0), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();
  if (curve.closed && !pts.empty()) cum.back() = cum[pts.size() - 1] + (pts.front() - pts.back()).norm();
  return cum;
}

Vec2 point_at_arc_length(const Curve2D& curve, const std::vector<double>& cum, double s) {
  const auto& pts = curve.points;
  const double total = cum.back();
  if (curve.closed) {
    s = std::fmod(s, total);
    if (s < 0) s += total;
  } else {
    s = std::clamp(s, 0.0, total);
  }
  // First knot strictly beyond s.
  auto it = std::upper_bound(cum.begin(), cum.end(), s);
  std::size_t hi = static_cast<std::size_t>(it - cum.begin());
  if (hi == 0) return pts.front();
  if (hi >= cum.size()) return curve.closed ? pts.front() : pts.back();
  const std::size_t lo = hi - 1;
  const Vec2& a = pts[lo];
  const Vec2& b = pts[hi % pts.size()];
  const double seg = cum[hi] - cum[lo];
  if (seg <= 0) return a;
  return a + (b - a) * ((s - cum[lo]) / seg);
}

double signed_area(const std::vector<Vec2>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

Curve2D reversed(const Curve2D& curve) {
  Curve2D out = curve;
  std::reverse(out.points.begin(), out.points.end());
  return out;
}

Curve2D resample_by_arclength(const Curve2D& curve, int n) {
  if (n < 8) throw ParameterError(fmt::format("resample count must be >= 8, got {}", n));
  curve.validate();
  const auto cum = cumulative_arc_length(curve);
  const double total = cum.back();
  Curve2D out;
  out.closed = curve.closed;
  out.points.reserve(static_cast<std::size_t>(n));
  const double step = curve.closed ? total / n : total / (n - 1);
  for (int i = 0; i < n; ++i) {
    if (!curve.closed && i == n - 1) {
      out.points.push_back(curve.points.back());
    } else {
      out.points.push_back(point_at_arc_length(curve, cum, step * i));
    }
  }
  return out;
}

Curve2D cut_window(const Curve2D& curve, double start, double fraction, bool reverse, int n) {
  if (n < 2) throw ParameterError("window needs at least 2 samples");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ParameterError(fmt::format("window fraction must lie in (0, 1], got {}", fraction));
  }
  curve.validate();
  const auto cum = cumulative_arc_length(curve);
  const double span = fraction * cum.back();
  const double dir = reverse ? -1.0 : 1.0;
  Curve2D out;
  out.closed = false;
  out.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) / (n - 1);
    out.points.push_back(point_at_arc_length(curve, cum, start + dir * u * span));
  }
  return out;
}

Curve2D smooth_curve(const Curve2D& curve, double sigma) {
  if (!(sigma > 0.0) || curve.points.size() < 3) return curve;
  const std::size_t n = curve.points.size();
  const auto cum = cumulative_arc_length(curve);
  const double length = curve.closed ? cum.back() : cum[n - 1];
  // Quadrature weight of each point: half of its two adjacent segments.
  std::vector<double> ds(n, 0.0);
  for (std::size_t i = 0; i + 1 < cum.size(); ++i) {
    const double seg = cum[i + 1] - cum[i];
    ds[i] += 0.5 * seg;
    ds[(i + 1) % n] += 0.5 * seg;
  }
  const double reach = 4.0 * sigma;
  Curve2D out = curve;
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 sum = Vec2::Zero();
    double wsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double d = std::abs(cum[i] - cum[j]);
      if (curve.closed) d = std::min(d, length - d);
      if (d > reach) continue;
      const double w = std::exp(-0.5 * d * d / (sigma * sigma)) * std::max(ds[j], 1e-12 * length);
      sum += w * curve.points[j];
      wsum += w;
    }
    out.points[i] = sum / wsum;
  }
  return out;
}

void write_curve_csv(std::ostream& out, const Curve2D& curve, int view) {
  out << "# view=" << view << " closed=" << (curve.closed ? 1 : 0) << "\n";
  for (const auto& p : curve.points) out << fmt::format("{:.17g},{:.17g}\n", p.x(), p.y());
}

void write_curve_csv(const std::string& path, const Curve2D& curve, int view) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_curve_csv(out, curve, view);
  if (!out) throw IoError("failed writing " + path);
}

namespace {

double parse_double(std::string_view text, int line_no) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError(fmt::format("curve csv line {}: bad number '{}'", line_no, text));
  }
  return value;
}

}  // namespace

LabeledCurve read_curve_csv(std::istream& in) {
  LabeledCurve result;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (header_seen) continue;
      header_seen = true;
      std::istringstream tokens(line.substr(1));
      std::string token;
      while (tokens >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "view") {
          result.view = static_cast<int>(parse_double(value, line_no));
        } else if (key == "closed") {
          result.curve.closed = parse_double(value, line_no) != 0.0;
        }
      }
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError(fmt::format("curve csv line {}: expected x,y", line_no));
    const std::string_view view(line);
    result.curve.points.emplace_back(parse_double(view.substr(0, comma), line_no),
                                     parse_double(view.substr(comma + 1), line_no));
  }
  if (!header_seen) throw IoError("curve csv is missing the '# view=<k> closed=<0|1>' header");
  return result;
}

LabeledCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_curve_csv(in);
}

}  // namespace acetrec
