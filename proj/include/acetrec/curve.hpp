#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace acetrec {

using Vec2 = Eigen::Vector2d;

/// Ordered planar point sequence in pixels.
struct Curve2D {
  std::vector<Vec2> points;
  bool closed = false;

  std::size_t size() const { return points.size(); }

  /// Throws DegenerateInputError unless >= 2 finite points with positive length.
  void validate() const;
};

/// Total polyline length, including the closing segment for closed curves.
double arc_length(const Curve2D& curve);

/// Arc-length position of every point; for closed curves one extra entry
/// holds the full loop length.
std::vector<double> cumulative_arc_length(const Curve2D& curve);

/// Point at arc-length position `s` (wrapped for closed curves, clamped otherwise).
Vec2 point_at_arc_length(const Curve2D& curve, const std::vector<double>& cumulative,
                         double s);

/// Signed polygon area (positive for counter-clockwise in a y-up frame).
double signed_area(const std::vector<Vec2>& polygon);

Curve2D reversed(const Curve2D& curve);

/// n points at uniform arc-length spacing. Open curves keep both endpoints;
/// closed curves start at the first point and do not repeat it.
Curve2D resample_by_arclength(const Curve2D& curve, int n);

/// Open n-point curve sampled uniformly along the window
/// [start, start + fraction * L] of a closed (or open) curve, traversed
/// backwards when `reverse` is set.
Curve2D cut_window(const Curve2D& curve, double start, double fraction, bool reverse, int n);

/// Gaussian smoothing along the curve (sigma in arc-length units; periodic
/// for closed curves, renormalized kernel at the ends of open ones). Points
/// are weighted by their share of arc length, so the result does not depend
/// on how densely a stretch is sampled. sigma <= 0 returns the input.
Curve2D smooth_curve(const Curve2D& curve, double sigma);

// Curve CSV: header "# view=<k> closed=<0|1>" then one "x,y" per line.
struct LabeledCurve {
  Curve2D curve;
  int view = 0;
};

void write_curve_csv(std::ostream& out, const Curve2D& curve, int view);
void write_curve_csv(const std::string& path, const Curve2D& curve, int view);
LabeledCurve read_curve_csv(std::istream& in);
LabeledCurve read_curve_csv(const std::string& path);

}  // namespace acetrec
