#pragma once

#include "acetrec/curve.hpp"
#include "acetrec/mesh.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <vector>

namespace testutil {

using acetrec::Curve2D;
using acetrec::Mat3;
using acetrec::Vec2;
using acetrec::Vec3;

constexpr double kPi = 3.14159265358979323846;

inline acetrec::View camera(double f = 1000.0, double depth = 1000.0) {
  acetrec::View v;
  v.K << f, 0, 512, 0, f, 512, 0, 0, 1;
  v.t = Vec3(0, 0, depth);
  v.width = v.height = 1024;
  return v;
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

// Smooth open test curve (a wavy arc), n samples with parameter t in [0, 1].
inline Vec2 wavy(double t) {
  return {40.0 * std::cos(2.2 * t) + 3.0 * std::sin(9.0 * t), 30.0 * std::sin(2.2 * t) + 2.0 * std::cos(7.0 * t)};
}

inline Curve2D sample_open(int n, double (*warp)(double) = nullptr) {
  Curve2D c;
  for (int i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / (n - 1);
    if (warp) t = warp(t);
    c.points.push_back(wavy(t));
  }
  return c;
}

// Closed lobed loop.
inline Curve2D sample_closed(int n, double phase = 0.0) {
  Curve2D c;
  c.closed = true;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * i / n + phase;
    const double r = 50.0 + 8.0 * std::cos(3.0 * a) + 4.0 * std::sin(2.0 * a);
    c.points.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return c;
}

inline Curve2D transformed(const Curve2D& c, double scale, double angle, const Vec2& shift) {
  const Eigen::Rotation2Dd rot(angle);
  Curve2D out = c;
  for (auto& p : out.points) p = scale * (rot * p) + shift;
  return out;
}

}  // namespace testutil
