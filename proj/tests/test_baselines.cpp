#include "acetrec/baselines.hpp"
#include "acetrec/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>

using namespace acetrec;

namespace {

SilhouetteCurve silhouette_of(const Curve2D& c, int offset = 0) {
  SilhouetteCurve s;
  s.points = c.points;
  s.closed = c.closed;
  for (std::size_t i = 0; i < c.size(); ++i) s.source_vertex.push_back(offset + static_cast<int>(i));
  return s;
}

std::size_t brute_nearest(const std::vector<Vec2>& pts, const Vec2& p) {
  std::vector<double> d(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) d[i] = (pts[i] - p).norm();
  return static_cast<std::size_t>(std::min_element(d.begin(), d.end()) - d.begin());
}

// Normal from the neighbouring points, pointing away from the centroid.
Vec2 ref_normal(const std::vector<Vec2>& pts, std::size_t i, bool closed) {
  const std::size_t n = pts.size();
  const std::size_t a = closed ? (i + n - 1) % n : (i == 0 ? 0 : i - 1);
  const std::size_t b = closed ? (i + 1) % n : std::min(i + 1, n - 1);
  const Vec2 t = (pts[b] - pts[a]).normalized();
  Vec2 c = Vec2::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(n);
  Vec2 nrm(t.y(), -t.x());
  return nrm.dot(pts[i] - c) < 0 ? -nrm : nrm;
}

Curve2D noisy_arc(std::mt19937_64& rng, int n, double radius, double sd) {
  std::normal_distribution<double> noise(0.0, sd);
  Curve2D c;
  for (int i = 0; i < n; ++i) {
    const double a = 0.2 + 2.5 * i / (n - 1);
    c.points.emplace_back(radius * std::cos(a) + noise(rng), radius * std::sin(a) + noise(rng));
  }
  return c;
}

}  // namespace

TEST_CASE("strategy names") {
  CHECK(parse_strategy("srvf") == StrategyTag::Srvf);
  CHECK(parse_strategy("icp") == StrategyTag::Icp);
  CHECK(parse_strategy("icp-normvec") == StrategyTag::IcpNormVec);
  for (auto t : {StrategyTag::Srvf, StrategyTag::Icp, StrategyTag::IcpNormVec}) CHECK(parse_strategy(to_string(t)) == t);
  CHECK_THROWS_AS(parse_strategy("nearest"), ParameterError);
  CorrespondenceStrategy s{StrategyTag::IcpNormVec, 0.0};
  CHECK_THROWS_AS(s.validate(), ParameterError);
  s.normal_angle_deg = 90.0;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("icp pairs each observation with its nearest silhouette point") {
  std::mt19937_64 rng(1);
  const SilhouetteCurve sil = silhouette_of(testutil::sample_closed(200), 500);
  const Curve2D obs = noisy_arc(rng, 150, 52.0, 3.0);
  const CorrespondenceSet cs = icp_correspondences(sil, obs, 1);
  REQUIRE(cs.size() == obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    CHECK(cs.items[i].vertex == 500 + static_cast<int>(brute_nearest(sil.points, obs.points[i])));
    CHECK(cs.items[i].point == obs.points[i]);
    CHECK(cs.items[i].view == 1);
  }
}

TEST_CASE("icp coincident points and ties") {
  const SilhouetteCurve sil = silhouette_of(Curve2D{{Vec2(0, 0), Vec2(2, 0), Vec2(2, 2)}, true});
  const auto cs = icp_correspondences(sil, Curve2D{{Vec2(2, 2), Vec2(1, 0)}, false}, 0);
  CHECK(cs.items[0].vertex == 2);
  CHECK(cs.items[1].vertex == 0);  // equidistant from 0 and 1
  CHECK_THROWS_AS(icp_correspondences(SilhouetteCurve{}, Curve2D{{Vec2(0, 0)}, false}, 0), DegenerateInputError);
}

TEST_CASE("curve normals point outwards") {
  Curve2D circle;
  circle.closed = true;
  for (int i = 0; i < 64; ++i) circle.points.emplace_back(std::cos(2 * testutil::kPi * i / 64), std::sin(2 * testutil::kPi * i / 64));
  const auto n = curve_normals(circle.points, true);
  for (std::size_t i = 0; i < n.size(); ++i) {
    CHECK(n[i].norm() == doctest::Approx(1.0));
    CHECK(n[i].dot(circle.points[i]) == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(normal_angle_deg(Vec2(1, 0), Vec2(0, 1)) == doctest::Approx(90.0));
  CHECK(normal_angle_deg(Vec2(1, 0), Vec2(-1, 0)) == doctest::Approx(180.0));
}

TEST_CASE("normal filtering") {
  std::mt19937_64 rng(2);
  const Curve2D model = testutil::sample_closed(200);
  const SilhouetteCurve sil = silhouette_of(model);

  SUBCASE("identical curves keep everything") {
    for (double th : {1.0, 30.0, 90.0}) CHECK(normvec_correspondences(sil, model, 0, th).size() == model.size());
  }
  SUBCASE("perpendicular segment is rejected") {
    Curve2D square;
    square.closed = true;
    for (int i = 0; i < 40; ++i) square.points.emplace_back(i, 0);
    for (int i = 0; i < 40; ++i) square.points.emplace_back(40, i);
    for (int i = 0; i < 40; ++i) square.points.emplace_back(40 - i, 40);
    for (int i = 0; i < 40; ++i) square.points.emplace_back(0, 40 - i);
    Curve2D across;
    for (int i = 0; i < 5; ++i) across.points.emplace_back(20.2, -2.0 + i);
    CHECK(normvec_correspondences(silhouette_of(square), across, 0, 45.0).empty());
    CHECK(icp_correspondences(silhouette_of(square), across, 0).size() == 5);
  }
  SUBCASE("matches a brute-force filter, and is a monotone subset of icp") {
    const Curve2D obs = noisy_arc(rng, 120, 50.0, 4.0);
    const auto icp = icp_correspondences(sil, obs, 0);
    std::size_t previous = 0;
    for (double th : {5.0, 15.0, 30.0, 60.0, 90.0}) {
      const auto kept = normvec_correspondences(sil, obs, 0, th);
      std::vector<int> expect;
      for (std::size_t i = 0; i < obs.size(); ++i) {
        const std::size_t j = brute_nearest(sil.points, obs.points[i]);
        const Vec2 a = ref_normal(sil.points, j, true), b = ref_normal(obs.points, i, false);
        const double angle = std::acos(std::clamp(a.dot(b), -1.0, 1.0)) * 180.0 / testutil::kPi;
        if (angle <= th) expect.push_back(static_cast<int>(i));
      }
      REQUIRE(kept.size() == expect.size());
      for (std::size_t k = 0; k < kept.size(); ++k) {
        CHECK(kept.items[k].point == obs.points[static_cast<std::size_t>(expect[k])]);
        CHECK(kept.items[k].vertex == icp.items[static_cast<std::size_t>(expect[k])].vertex);
      }
      CHECK(kept.size() >= previous);
      previous = kept.size();
    }
  }
  CHECK_THROWS_AS(normvec_correspondences(sil, model, 0, 120.0), ParameterError);
}
