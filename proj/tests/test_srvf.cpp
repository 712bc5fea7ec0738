#include "acetrec/errors.hpp"
#include "acetrec/srvf.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>


using namespace acetrec;
using testutil::kPi;

namespace {

double square(double t) { return t * t; }
double smooth_warp(double t) { return t + 0.15 * std::sin(kPi * t) * (1.0 - t) * 1.5; }

double unaligned_distance(const Curve2D& a, const Curve2D& b, int n) {
  return srvf_distance(to_srvf(resample_by_arclength(a, n)), to_srvf(resample_by_arclength(b, n)));
}

}  // namespace

TEST_CASE("resample a straight segment") {
  const Curve2D seg{{Vec2(0, 0), Vec2(10, 0)}, false};
  const Curve2D r = resample_by_arclength(seg, 11);
  REQUIRE(r.size() == 11);
  for (int i = 0; i <= 10; ++i) CHECK((r.points[i] - Vec2(i, 0)).norm() < 1e-12);
  CHECK_THROWS_AS(resample_by_arclength(Curve2D{{Vec2(1, 1), Vec2(1, 1)}, false}, 8), DegenerateInputError);
}

TEST_CASE("resampling a uniform curve is idempotent") {
  const Curve2D seg = resample_by_arclength(Curve2D{{Vec2(0, 0), Vec2(10, 0), Vec2(10, 5)}, false}, 31);
  const Curve2D again = resample_by_arclength(seg, 31);
  for (std::size_t i = 0; i < seg.size(); ++i) CHECK((seg.points[i] - again.points[i]).norm() < 1e-9);
}

TEST_CASE("closed resampling gives even chords") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  std::vector<double> angles(200);
  for (auto& a : angles) a = u(rng);
  std::sort(angles.begin(), angles.end());
  Curve2D circle;
  circle.closed = true;
  for (double a : angles) circle.points.emplace_back(std::cos(a), std::sin(a));
  const Curve2D r = resample_by_arclength(circle, 100);
  double lo = 1e9, hi = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double d = (r.points[(i + 1) % r.size()] - r.points[i]).norm();
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  CHECK((hi - lo) / hi < 0.01);
}

TEST_CASE("srvf of a straight line is constant") {
  Curve2D line, line2, shifted;
  for (int i = 0; i < 20; ++i) {
    const double t = i / 19.0;
    line.points.emplace_back(t, 0.0);
    line2.points.emplace_back(2.0 * t, 0.0);
    shifted.points.emplace_back(t + 5.0, 7.0);
  }
  const SrvfCurve q = to_srvf(line);
  for (const auto& s : q.samples) CHECK((s - Vec2(1, 0)).norm() < 1e-12);
  const SrvfCurve q2 = to_srvf(line2), q3 = to_srvf(shifted);
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK((q2.samples[i] - q.samples[i]).norm() < 1e-12);
    CHECK((q3.samples[i] - q.samples[i]).norm() < 1e-12);
  }
  CHECK(q2.original_length == doctest::Approx(2.0));

  const Curve2D back = from_srvf(q, Vec2::Zero());
  CHECK((back.points.front() - Vec2(0, 0)).norm() < 1e-12);
  CHECK((back.points.back() - Vec2(1, 0)).norm() < 1e-12);
}

TEST_CASE("srvf has unit norm") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) {
    const SrvfCurve q = to_srvf(oracle::random_walk(rng, 40));
    double s = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) s += q.weight(k) * q.samples[k].squaredNorm();
    CHECK(std::abs(s - 1.0) < 1e-6);
  }
  const SrvfCurve qc = to_srvf(testutil::sample_closed(64));
  double s = 0.0;
  for (std::size_t k = 0; k < qc.size(); ++k) s += qc.weight(k) * qc.samples[k].squaredNorm();
  CHECK(std::abs(s - 1.0) < 1e-6);
}

TEST_CASE("srvf rejects repeated points") {
  CHECK_THROWS_AS(to_srvf(Curve2D{{Vec2(0, 0), Vec2(1, 0), Vec2(1, 0), Vec2(2, 0)}, false}), DegenerateInputError);
}

TEST_CASE("srvf round trip on a noisy curve") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.02);
  Curve2D c = testutil::sample_open(100);
  for (auto& p : c.points) p += Vec2(noise(rng), noise(rng));
  const SrvfCurve q = to_srvf(c);
  Vec2 centroid = Vec2::Zero();
  for (const auto& p : c.points) centroid += p;
  centroid /= static_cast<double>(c.size());
  const Curve2D back = from_srvf(q, (c.points.front() - centroid) / q.original_length);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    worst = std::max(worst, (q.original_length * back.points[i] + centroid - c.points[i]).norm());
  }
  CHECK(worst / arc_length(c) < 1e-3);
}

TEST_CASE("srvf of a circle integrates to a closed loop") {
  Curve2D circle;
  circle.closed = true;
  for (int i = 0; i < 100; ++i) circle.points.emplace_back(std::cos(2 * kPi * i / 100), std::sin(2 * kPi * i / 100));
  const SrvfCurve q = to_srvf(circle);
  const Curve2D back = from_srvf(q, Vec2::Zero());
  // Integrate the missing closing interval by hand.
  const Vec2 last = q.samples.back() * q.samples.back().norm(), first = q.samples.front() * q.samples.front().norm();
  const Vec2 end = back.points.back() + 0.5 * q.step() * (last + first);
  CHECK((end - back.points.front()).norm() < 1e-2 * arc_length(back));
}

TEST_CASE("optimal rotation") {
  const SrvfCurve qm = to_srvf(testutil::sample_open(60));
  CHECK((optimal_rotation(qm, qm).rotation - Mat2::Identity()).norm() < 1e-12);

  const double angle = 37.0 * kPi / 180.0;
  const SrvfCurve qo = rotated(qm, rotation_2d(angle));
  const Mat2 r = optimal_rotation(qm, qo).rotation;
  CHECK(std::abs(std::atan2(r(1, 0), r(0, 0)) - angle) < 1e-9);

  // Brute-force scan against a noisy target.
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, 0.3);
  SrvfCurve qn = qo;
  for (auto& s : qn.samples) s += Vec2(noise(rng), noise(rng));
  double best = 1e300, best_angle = 0.0;
  for (int k = 0; k < 36000; ++k) {
    const double a = k * 0.01 * kPi / 180.0;
    const double d = srvf_distance(rotated(qm, rotation_2d(a)), qn);
    if (d < best) best = d, best_angle = a;
  }
  const Mat2 rn = optimal_rotation(qm, qn).rotation;
  double got = std::atan2(rn(1, 0), rn(0, 0));
  if (got < 0) got += 2 * kPi;
  CHECK(std::abs(got - best_angle) <= 0.01 * kPi / 180.0 + 1e-12);

  SrvfCurve zero = qm;
  for (auto& s : zero.samples) s = Vec2::Zero();
  const auto degenerate = optimal_rotation(qm, zero);
  CHECK(degenerate.degenerate);
  CHECK((degenerate.rotation - Mat2::Identity()).norm() == 0.0);
}

TEST_CASE("dp reparameterization on identical curves is the identity") {
  const SrvfCurve q = to_srvf(testutil::sample_open(100));
  const Reparam g = dp_reparameterize(q, q, 100);
  for (std::size_t s = 0; s < g.values.size(); ++s) CHECK(std::abs(g.values[s] - s / 99.0) < 1e-12);
  CHECK(warp_cost(q, q, g) < 1e-20);
  CHECK_THROWS_AS(dp_reparameterize(q, q, 7), ParameterError);
}

TEST_CASE("dp recovers a quadratic warp") {
  const int n = 100, grid = 50;
  const SrvfCurve qm = to_srvf(testutil::sample_open(n));
  const SrvfCurve qo = to_srvf(testutil::sample_open(n, square));
  const Reparam g = dp_reparameterize(qm, qo, grid);
  double worst = 0.0;
  for (int s = 0; s < n; ++s) {
    const double t = s / (n - 1.0);
    worst = std::max(worst, std::abs(g.values[s] - t * t));
  }
  CHECK(worst <= 2.0 / (grid - 1));
  CHECK(g.values.front() == 0.0);
  CHECK(g.values.back() == 1.0);
  for (int s = 1; s < n; ++s) CHECK(g.values[s] >= g.values[s - 1]);
}

TEST_CASE("dp matches exhaustive lattice enumeration") {
  std::mt19937_64 rng(21);
  const auto slopes = default_slopes();
  for (int trial = 0; trial < 20; ++trial) {
    const int n = trial < 4 ? 16 : 12;
    const SrvfCurve qm = to_srvf(oracle::random_walk(rng, n));
    const SrvfCurve qo = to_srvf(oracle::random_walk(rng, n));
    const Reparam g = dp_reparameterize(qm, qo, n);
    const double dp = warp_cost(qm, qo, g);
    const double best = oracle::exhaustive_path_cost(qm, qo, slopes);
    CHECK(std::abs(dp - best) <= 1e-12 * std::max(1.0, best));
  }
}

TEST_CASE("elastic alignment of a curve with itself") {
  const Curve2D c = testutil::sample_open(100);
  const AlignmentResult a = elastic_align(c, c);
  CHECK(a.distance < 1e-9);
  CHECK((a.rotation - Mat2::Identity()).norm() < 1e-9);
  CHECK_FALSE(a.window.reversed);
  for (std::size_t s = 0; s < a.gamma.values.size(); ++s) CHECK(std::abs(a.gamma.values[s] - s / 99.0) < 1e-12);
}

TEST_CASE("elastic alignment is invariant to similarity and warping") {
  const Curve2D c = testutil::sample_open(100);
  SUBCASE("translation and scale") {
    for (double scale : {0.3, 1.7, 12.0}) {
      CHECK(elastic_align(c, testutil::transformed(c, scale, 0.0, Vec2(-40, 300))).distance < 1e-6);
    }
  }
  SUBCASE("rotation grid") {
    for (int deg = 10; deg <= 350; deg += 10) {
      const AlignmentResult a = elastic_align(c, testutil::transformed(c, 1.0, deg * kPi / 180.0, Vec2::Zero()));
      CHECK(a.distance < 1e-6);
      double got = std::atan2(a.rotation(1, 0), a.rotation(0, 0)) * 180.0 / kPi;
      if (got < 0) got += 360.0;
      CHECK(std::abs(got - deg) < 1e-6);
    }
  }
  SUBCASE("reparameterization") {
    CHECK(elastic_align(c, testutil::sample_open(100, smooth_warp)).distance < 1e-2);
    CHECK(elastic_align(c, testutil::sample_open(100, square)).distance < 1e-2);
  }
  SUBCASE("all four at once") {
    Curve2D obs = testutil::transformed(testutil::sample_open(100, square), 1.7, 25.0 * kPi / 180.0, Vec2(13, -4));
    CHECK(elastic_align(c, obs).distance < 1e-2);
  }
}

TEST_CASE("closed alignment is invariant to start point and rotation") {
  const Curve2D model = testutil::sample_closed(150);
  const Curve2D obs = testutil::transformed(testutil::sample_closed(150, 0.7), 0.8, 1.1, Vec2(300, 200));
  const AlignmentResult a = elastic_align(model, obs);
  CHECK(a.distance < 0.05);
  CHECK(a.distance <= a.initial_distance + 1e-9);
}

TEST_CASE("alignment never increases the distance") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> noise(0.0, 2.0);
  const Curve2D c = testutil::sample_open(100);
  for (int trial = 0; trial < 5; ++trial) {
    Curve2D obs = c;
    for (auto& p : obs.points) p += Vec2(noise(rng), noise(rng));
    ElasticConfig raw;
    raw.smoothing = 0.0;
    const AlignmentResult a = elastic_align(c, obs, raw);
    CHECK(a.distance <= a.initial_distance + 1e-9);
    CHECK(a.distance < unaligned_distance(c, obs, raw.samples));
  }
}

TEST_CASE("aligned model curve is expressed in observation pixels") {
  const Curve2D c = testutil::sample_open(100);
  const Curve2D obs = testutil::transformed(c, 2.0, 0.5, Vec2(400, 100));
  const AlignmentResult a = elastic_align(c, obs);
  const Curve2D target = resample_by_arclength(alignment_smoothed(obs, a.smoothing), 100);
  double worst = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) worst = std::max(worst, (a.aligned_model_curve.points[i] - target.points[i]).norm());
  CHECK(worst < 1e-3 * arc_length(obs));
}

TEST_CASE("correspondences follow the warp") {
  SUBCASE("identity alignment maps index to index") {
    const Curve2D c = testutil::sample_closed(80);
    SilhouetteCurve sil{c.points, {}, true};
    for (int i = 0; i < 80; ++i) sil.source_vertex.push_back(1000 + i);
    const AlignmentResult a = elastic_align(c, c);
    const CorrespondenceSet cs = infer_correspondences(a, sil, c, 2);
    REQUIRE(cs.size() == 80);
    for (int i = 0; i < 80; ++i) {
      CHECK(cs.items[i].vertex == 1000 + i);
      CHECK(cs.items[i].view == 2);
      CHECK(cs.items[i].point == c.points[i]);
    }
  }
  SUBCASE("quadratic warp sends the midpoint to a quarter") {
    SilhouetteCurve sil;
    sil.closed = false;
    Curve2D obs;
    for (int i = 0; i <= 100; ++i) {
      sil.points.emplace_back(i, 0.0);
      sil.source_vertex.push_back(i);
      obs.points.emplace_back(2.0 * i, 5.0);
    }
    AlignmentResult a;
    a.smoothing = 0.0;
    for (int s = 0; s < 100; ++s) a.gamma.values.push_back(square(s / 99.0));
    const CorrespondenceSet cs = infer_correspondences(a, sil, obs, 0);
    CHECK(cs.size() == 101);
    CHECK(cs.items[50].vertex == 25);
  }
  SUBCASE("cardinality equals the observation count") {
    const Curve2D model = testutil::sample_closed(120);
    SilhouetteCurve sil{model.points, {}, true};
    for (int i = 0; i < 120; ++i) sil.source_vertex.push_back(i);
    Curve2D obs = resample_by_arclength(testutil::sample_open(300), 80);
    const AlignmentResult a = elastic_align(model, obs);
    CHECK(infer_correspondences(a, sil, obs, 1).size() == 80);
  }
  SUBCASE("out of range warp is an internal error") {
    SilhouetteCurve sil{{Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)}, {0, 1, 2}, false};
    AlignmentResult a;
    a.gamma.values = std::vector<double>(10, 1.5);
    CHECK_THROWS_AS(infer_correspondences(a, sil, Curve2D{{Vec2(0, 0), Vec2(3, 0)}, false}, 0), InternalError);
  }
}

TEST_CASE("smoothing keeps lines and commutes with similarity") {
  Curve2D line;
  for (int i = 0; i < 50; ++i) line.points.emplace_back(i, 2.0 * i);
  const Curve2D s = smooth_curve(line, 3.0);
  for (std::size_t i = 15; i + 15 < line.size(); ++i) CHECK((s.points[i] - line.points[i]).norm() < 1e-9);

  const Curve2D closed = testutil::sample_closed(100);
  const Curve2D a = testutil::transformed(alignment_smoothed(closed, 0.02), 2.0, 0.3, Vec2(4, 5));
  const Curve2D b = alignment_smoothed(testutil::transformed(closed, 2.0, 0.3, Vec2(4, 5)), 0.02);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a.points[i] - b.points[i]).norm() < 1e-9);
}

TEST_CASE("smoothing does not depend on sampling density") {
  // Same circle, uniform vs strongly uneven sampling: smoothed points stay on
  // a common circle of slightly reduced radius.
  Curve2D uniform, uneven;
  uniform.closed = uneven.closed = true;
  for (int i = 0; i < 200; ++i) {
    const double t = i / 200.0;
    const double a = 2 * kPi * t, b = 2 * kPi * (t + 0.12 * std::sin(2 * kPi * t));
    uniform.points.emplace_back(30 * std::cos(a), 30 * std::sin(a));
    uneven.points.emplace_back(30 * std::cos(b), 30 * std::sin(b));
  }
  const double sigma = 4.0;
  const Curve2D su = smooth_curve(uniform, sigma), sn = smooth_curve(uneven, sigma);
  const double r = su.points[0].norm();
  for (const auto& p : su.points) CHECK(p.norm() == doctest::Approx(r).epsilon(1e-6));
  for (const auto& p : sn.points) CHECK(p.norm() == doctest::Approx(r).epsilon(2e-3));
}
