#include "acetrec/errors.hpp"
#include "acetrec/experiment.hpp"
#include "acetrec/gauss_newton.hpp"
#include "acetrec/reconstruct.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace acetrec;

namespace {

// Correspondences that the identity graph satisfies exactly.
CorrespondenceSet exact_corrs(const Mesh& mesh, const std::vector<View>& views, int stride = 7) {
  CorrespondenceSet cs;
  for (std::size_t k = 0; k < views.size(); ++k) {
    for (std::size_t i = 0; i < mesh.vertices.size(); i += static_cast<std::size_t>(stride)) {
      cs.items.push_back({static_cast<int>(k), static_cast<int>(i), views[k].project(mesh.vertices[i])});
    }
  }
  return cs;
}

double brute_cost(const Eigen::VectorXd& rot, const Eigen::VectorXd& reg, const Eigen::VectorXd& obs,
                  const EnergyWeights& w) {
  double a = 0.0, b = 0.0, c = 0.0;
  for (Eigen::Index i = 0; i < rot.size(); ++i) a += rot[i] * rot[i];
  for (Eigen::Index i = 0; i < reg.size(); ++i) b += reg[i] * reg[i];
  for (Eigen::Index i = 0; i < obs.size(); ++i) c += obs[i] * obs[i];
  return w.w_rot * a + w.w_reg * b + w.w_obs * c;
}

}  // namespace

TEST_CASE("rotation residuals") {
  std::mt19937_64 rng(1);
  DeformationGraph g = oracle::make_problem(rng).graph;
  CHECK(residuals_rot(g).cwiseAbs().maxCoeff() == 0.0);
  for (auto& p : g.params) p.A = testutil::random_rotation(rng);
  CHECK(residuals_rot(g).cwiseAbs().maxCoeff() < 1e-12);
  g.params[0].A = Eigen::Vector3d(2, 1, 1).asDiagonal();
  Eigen::VectorXd expect(6);
  expect << 0, 0, 0, 3, 0, 0;
  CHECK((residuals_rot(g).head(6) - expect).norm() == 0.0);
}

TEST_CASE("regularization residuals") {
  std::mt19937_64 rng(2);
  auto p = oracle::make_problem(rng);
  CHECK(residuals_reg(p.graph).cwiseAbs().maxCoeff() == 0.0);
  for (auto& np : p.graph.params) np.t = Vec3(4, -1, 2);
  CHECK(residuals_reg(p.graph).cwiseAbs().maxCoeff() < 1e-12);
  set_rigid_params(p.graph, testutil::random_rotation(rng), Vec3(1, 2, 3));
  CHECK(residuals_reg(p.graph).cwiseAbs().maxCoeff() < 1e-9);
  std::size_t pairs = 0;
  for (const auto& n : p.graph.neighbors) pairs += n.size();
  CHECK(residuals_reg(p.graph).size() == static_cast<Eigen::Index>(3 * pairs));
}

TEST_CASE("observation residuals") {
  std::mt19937_64 rng(3);
  auto p = oracle::make_problem(rng);
  const auto exact = exact_corrs(p.mesh, p.views);
  CHECK(residuals_obs(p.graph, p.mesh, exact, p.views).cwiseAbs().maxCoeff() < 1e-9);

  // View 1 without correspondences contributes nothing; rows are view-ordered.
  CorrespondenceSet cs;
  cs.items.push_back({2, 0, Vec2(0, 0)});
  cs.items.push_back({0, 1, Vec2(0, 0)});
  const Eigen::VectorXd r = residuals_obs(p.graph, p.mesh, cs, p.views);
  CHECK(r.size() == 4);
  CHECK(r[0] == doctest::Approx(p.views[0].project(p.mesh.vertices[1]).x()));
  CHECK(r[2] == doctest::Approx(p.views[2].project(p.mesh.vertices[0]).x()));

  // A known deformation reproduces its own projections.
  DeformationGraph moved = p.graph;
  oracle::randomize(moved, rng, 0.05);
  const Mesh target = deform_mesh(p.mesh, moved);
  CorrespondenceSet known;
  for (std::size_t k = 0; k < p.views.size(); ++k) {
    for (std::size_t i = 0; i < p.mesh.vertices.size(); i += 5) {
      known.items.push_back({static_cast<int>(k), static_cast<int>(i), p.views[k].project(target.vertices[i])});
    }
  }
  CHECK(residuals_obs(moved, p.mesh, known, p.views).cwiseAbs().maxCoeff() < 1e-9);

  for (auto& np : moved.params) np.t = Vec3(0, 0, 0);
  for (auto& np : moved.params) np.t = -(p.views[0].R.transpose() * p.views[0].t) * 1.1;
  try {
    residuals_obs(moved, p.mesh, cs, p.views);
    FAIL("expected a projection error");
  } catch (const ProjectionError& e) {
    CHECK((e.index() == 0 || e.index() == 1));
  }
}

TEST_CASE("total cost") {
  std::mt19937_64 rng(4);
  auto p = oracle::make_problem(rng);
  EnergyWeights w;
  CHECK(total_cost(p.graph, p.mesh, exact_corrs(p.mesh, p.views), p.views, w) < 1e-12);

  EnergyWeights obs_only{0.0, 0.0, 1.0, false};
  oracle::randomize(p.graph, rng);
  const Eigen::VectorXd ro = residuals_obs(p.graph, p.mesh, p.corrs, p.views);
  CHECK(total_cost(p.graph, p.mesh, p.corrs, p.views, obs_only) == ro.squaredNorm());

  for (int trial = 0; trial < 5; ++trial) {
    oracle::randomize(p.graph, rng);
    EnergyWeights ww{0.5 + trial, 3.0, 40.0, false};
    const double oracle_cost = brute_cost(residuals_rot(p.graph), residuals_reg(p.graph),
                                          residuals_obs(p.graph, p.mesh, p.corrs, p.views), ww);
    const double cost = total_cost(p.graph, p.mesh, p.corrs, p.views, ww);
    CHECK(std::abs(cost - oracle_cost) <= 1e-12 * oracle_cost);
    const EnergyTerms t = energy_terms(p.graph, p.mesh, p.corrs, p.views, ww);
    CHECK(std::abs(t.total() - cost) <= 1e-12 * cost);
  }

  CHECK_THROWS_AS((EnergyWeights{0, 0, 0, false}.validate()), ParameterError);
  CHECK_THROWS_AS((EnergyWeights{-1, 1, 1, false}.validate()), ParameterError);
}

TEST_CASE("per-view normalization divides each view by its count") {
  std::mt19937_64 rng(5);
  auto p = oracle::make_problem(rng);
  oracle::randomize(p.graph, rng);
  EnergyWeights raw{0.0, 0.0, 1.0, false}, norm{0.0, 0.0, 1.0, true};
  double expect = 0.0;
  for (int k = 0; k < 3; ++k) {
    CorrespondenceSet one;
    for (const auto& c : p.corrs.items) {
      if (c.view == k) one.items.push_back(c);
    }
    expect += total_cost(p.graph, p.mesh, one, p.views, raw) / static_cast<double>(one.size());
  }
  CHECK(total_cost(p.graph, p.mesh, p.corrs, p.views, norm) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("analytic jacobian matches finite differences") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    auto p = oracle::make_problem(rng, 10);
    oracle::randomize(p.graph, rng);
    EnergyWeights w;
    w.normalize_per_view = trial % 2 == 0;
    CHECK(oracle::jacobian_relative_error(p.graph, p.mesh, p.corrs, p.views, w) < 1e-4);
  }
}

TEST_CASE("rotation block at identity") {
  std::mt19937_64 rng(7);
  auto p = oracle::make_problem(rng, 8);
  const EnergyWeights w{1.0, 0.0, 0.0, false};
  const Eigen::MatrixXd J = Eigen::MatrixXd(jacobian(p.graph, p.mesh, CorrespondenceSet{}, p.views, w));
  // Node 0, A = I: d(ci.cl)/dA(k,i) = delta(k,l), d(ci.ci - 1)/dA(k,i) = 2 delta(k,i).
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(6, 12);
  auto col = [](int r, int c) { return 3 * r + c; };
  expect(0, col(1, 0)) = 1;
  expect(0, col(0, 1)) = 1;
  expect(1, col(2, 0)) = 1;
  expect(1, col(0, 2)) = 1;
  expect(2, col(2, 1)) = 1;
  expect(2, col(1, 2)) = 1;
  expect(3, col(0, 0)) = 2;
  expect(4, col(1, 1)) = 2;
  expect(5, col(2, 2)) = 2;
  CHECK((J.block(0, 0, 6, 12) - expect).norm() == 0.0);
}

TEST_CASE("gauss-newton at the optimum stays put") {
  std::mt19937_64 rng(8);
  auto p = oracle::make_problem(rng);
  const auto exact = exact_corrs(p.mesh, p.views);
  const auto res = gauss_newton_solve(p.graph, p.mesh, exact, p.views, EnergyWeights{});
  CHECK(res.iterations <= 1);
  CHECK(res.cost_trace.back() <= res.cost_trace.front());
  CHECK(res.cost_trace.back() < 1e-9);
  CHECK((flatten_params(res.graph) - flatten_params(p.graph)).norm() < 1e-6);
}

TEST_CASE("gauss-newton recovers a translation") {
  // Two nodes, one vertex on node 0, seen by two views.
  DeformationGraph g;
  g.nodes = {Vec3(0, 0, 0), Vec3(10, 0, 0)};
  g.params.assign(2, NodeParams{});
  g.neighbors = {{1}, {0}};
  g.bindings = {{Binding{0, 1.0}}};
  g.m = 1;
  Mesh m;
  m.vertices = {Vec3(0, 0, 0)};
  std::vector<View> views(2, ExperimentConfig::default_camera());
  views[1].R = views[0].R * rotation_z(testutil::kPi / 2);
  const Vec3 truth(3.0, -2.0, 1.5);
  CorrespondenceSet cs;
  for (int k = 0; k < 2; ++k) cs.items.push_back({k, 0, views[k].project(truth)});
  GaussNewtonConfig cfg;
  cfg.max_iterations = 50;
  cfg.tolerance = 1e-15;
  const auto res = gauss_newton_solve(g, m, cs, views, EnergyWeights{1.0, 10.0, 100.0, false}, cfg);
  CHECK((res.graph.params[0].t - truth).norm() < 1e-6);
  CHECK(res.cost_trace.back() < 1e-12);
}

TEST_CASE("gauss-newton cost trace decreases and solvers agree") {
  std::mt19937_64 rng(9);
  auto p = oracle::make_problem(rng);
  GaussNewtonConfig dense, sparse;
  dense.solver = LinearSolverKind::Dense;
  sparse.solver = LinearSolverKind::Sparse;
  const auto a = gauss_newton_solve(p.graph, p.mesh, p.corrs, p.views, EnergyWeights{}, dense);
  const auto b = gauss_newton_solve(p.graph, p.mesh, p.corrs, p.views, EnergyWeights{}, sparse);
  for (std::size_t i = 1; i < a.cost_trace.size(); ++i) CHECK(a.cost_trace[i] < a.cost_trace[i - 1]);
  CHECK(a.cost_trace.back() < a.cost_trace.front());
  CHECK(std::abs(a.cost_trace.back() - b.cost_trace.back()) <= 1e-6 * a.cost_trace.back());

  // Bitwise determinism.
  const auto c = gauss_newton_solve(p.graph, p.mesh, p.corrs, p.views, EnergyWeights{}, dense);
  CHECK(c.cost_trace == a.cost_trace);

  GaussNewtonConfig bad;
  bad.lambda_max = bad.lambda0 / 2;
  CHECK_THROWS_AS(gauss_newton_solve(p.graph, p.mesh, p.corrs, p.views, EnergyWeights{}, bad), ParameterError);
}

namespace {

struct Scene {
  Mesh mesh;
  std::vector<View> views;
  std::vector<Curve2D> contours;
};

Scene template_scene() {
  ExperimentConfig cfg;
  Scene s;
  s.mesh = fit_template(make_synthetic_target(cfg.target), cfg.template_level);
  auto sv = synthesize_views(s.mesh, cfg.view_angles_deg, cfg.camera);
  s.views = sv.views;
  s.contours = sv.contours;
  return s;
}

}  // namespace

TEST_CASE("reconstruction fixed point") {
  const Scene s = template_scene();
  int calls = 0;
  const auto res = reconstruct(s.mesh, s.contours, s.views, ReconstructionConfig{},
                               [&](const OuterIterationLog&, const Mesh&, const CorrespondenceSet&) { ++calls; });
  CHECK(evaluate_reconstruction(res.mesh, s.mesh).mae < 0.1);
  CHECK(res.recorrespondences >= 1);
  CHECK(res.recorrespondences <= 3);
  CHECK(res.converged);
  CHECK(calls == res.outer_iterations);
  CHECK(reconstruction_report_json(res).find("\"cost_trace\"") != std::string::npos);
}

TEST_CASE("reconstruction of a perturbed case") {
  ExperimentConfig cfg;
  const Mesh target = load_or_make_target(cfg);
  const SimulatedCase c = simulate_case(cfg, target, 1, 0);
  const double initial = evaluate_reconstruction(c.initial_template, target).mae;
  const auto res = reconstruct(c.initial_template, c.observations, c.views, cfg.solver);
  CHECK(evaluate_reconstruction(res.mesh, target).mae < 0.25 * initial);
  CHECK(res.recorrespondences >= 1);
  CHECK(res.recorrespondences <= 3);
  // Accepted GN costs never increase within a solve.
  std::size_t pos = 0;
  for (const auto& o : res.outer) {
    const std::size_t len = static_cast<std::size_t>(o.gn_iterations) + 1;
    for (std::size_t i = pos + 1; i < pos + len; ++i) CHECK(res.cost_trace[i] <= res.cost_trace[i - 1]);
    pos += len;
  }
  CHECK(pos == res.cost_trace.size());
}

TEST_CASE("baseline strategies recompute correspondences every iteration") {
  const Scene s = template_scene();
  ReconstructionConfig cfg;
  cfg.strategy.tag = StrategyTag::Icp;
  cfg.max_outer_iterations = 4;
  const auto res = reconstruct(s.mesh, s.contours, s.views, cfg);
  CHECK(res.recorrespondences == res.outer_iterations);
  for (const auto& o : res.outer) CHECK(o.recorresponded);
}

TEST_CASE("reconstruction argument checks") {
  const Scene s = template_scene();
  std::vector<View> two(s.views.begin(), s.views.begin() + 2);
  std::vector<Curve2D> two_c(s.contours.begin(), s.contours.begin() + 2);
  CHECK_THROWS_AS(reconstruct(s.mesh, two_c, two, {}), ParameterError);
  CHECK_THROWS_AS(reconstruct(s.mesh, two_c, s.views, {}), ParameterError);
  ReconstructionConfig bad;
  bad.max_recorrespondences = 4;
  CHECK_THROWS_AS(reconstruct(s.mesh, s.contours, s.views, bad), ParameterError);
}
