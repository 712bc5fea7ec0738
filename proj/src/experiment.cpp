#include "acetrec/experiment.hpp"

#include "acetrec/errors.hpp"
#include "acetrec/mesh_io.hpp"
#include "acetrec/sphere_fit.hpp"
#include "acetrec/surface_distance.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace acetrec {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Mat3 rotation_x(double a) { return axis_angle_rotation(Vec3::UnitX(), a); }
Mat3 rotation_y(double a) { return axis_angle_rotation(Vec3::UnitY(), a); }

}  // namespace

NoiseLevelSpec noise_level(int level) {
  static constexpr NoiseLevelSpec table[] = {
      {0.0, 0.0, 1.0}, {0.1, 10.0, 1.1}, {0.2, 30.0, 1.2}, {0.3, 50.0, 1.3}, {0.4, 80.0, 1.4}, {0.5, 100.0, 1.5},
  };
  if (level < 0 || level > 5) throw ParameterError(fmt::format("noise level must lie in [0, 5], got {}", level));
  return table[level];
}

View ExperimentConfig::default_camera() {
  View v;
  v.K << 2000.0, 0.0, 512.0, 0.0, 2000.0, 512.0, 0.0, 0.0, 1.0;
  // Camera x = model x, camera y = -model z (image up is superior), looking along model +y.
  v.R << 1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0;
  v.t = Vec3(0.0, 0.0, 1000.0);
  v.width = 1024;
  v.height = 1024;
  return v;
}

void ExperimentConfig::validate() const {
  if (view_angles_deg.size() < 3) throw ConfigurationError("experiments need at least 3 views");
  if (runs < 1) throw ConfigurationError("runs must be >= 1");
  if (!(contour_noise_sd >= 0.0)) throw ConfigurationError("contour noise SD must be nonnegative");
  if (strategies.empty()) throw ConfigurationError("no strategy selected");
  if (template_level < 0 || template_level > 7) throw ConfigurationError("template level must lie in [0, 7]");
  for (int level : levels) {
    if (level < 0 || level > 5) throw ConfigurationError(fmt::format("noise level {} outside [0, 5]", level));
  }
  camera.validate();
  try {
    solver.validate();
  } catch (const ParameterError& e) {
    throw ConfigurationError(e.what());
  }
}

Mat3 rotation_z(double radians) { return axis_angle_rotation(Vec3::UnitZ(), radians); }

Vec3 cup_opening_direction(double inclination_deg, double anteversion_deg) {
  const double inc = inclination_deg * kDeg;
  const double av = anteversion_deg * kDeg;
  return Vec3(std::cos(av) * std::sin(inc), -std::sin(av), -std::cos(av) * std::cos(inc));
}

Mesh make_synthetic_target(const TargetSpec& spec) {
  if (!(spec.radius > 0.0) || !(spec.bump_sigma > 0.0) || !(spec.axis_scale.minCoeff() > 0.0)) {
    throw ParameterError("target radius, bump width and axis scales must be positive");
  }
  Mesh mesh = generate_hemisphere(spec.radius, spec.level);
  const Vec3 opening = cup_opening_direction(spec.inclination_deg, spec.anteversion_deg);
  const Mat3 pose = rotation_between(-Vec3::UnitZ(), opening);

  // Bump centre: on the AP outline (direction in the model xz-plane), about
  // 50 degrees from the dome pole.
  const Vec3 dome = -opening;
  Vec3 best_dir = dome;
  double best_gap = std::numeric_limits<double>::infinity();
  for (int deg = 0; deg < 360; ++deg) {
    const Vec3 u(std::cos(deg * kDeg), 0.0, std::sin(deg * kDeg));
    const double gap = std::abs(u.dot(dome) - std::cos(50.0 * kDeg));
    if (u.dot(dome) > 0.0 && gap < best_gap) {
      best_gap = gap;
      best_dir = u;
    }
  }
  const Vec3 bump = pose.transpose() * best_dir;

  for (auto& v : mesh.vertices) {
    const double len = v.norm();
    if (len > 0.0) {
      const Vec3 dir = v / len;
      const double d = spec.radius * (dir - bump).norm();
      v += spec.bump_amplitude * std::exp(-d * d / (2.0 * spec.bump_sigma * spec.bump_sigma)) * dir;
    }
    v = pose * v.cwiseProduct(spec.axis_scale);
  }
  return mesh;
}

SyntheticViews synthesize_views(const Mesh& target, const std::vector<double>& angles_deg, const View& prototype) {
  prototype.validate();
  SyntheticViews out;
  for (double angle : angles_deg) {
    View v = prototype;
    v.R = prototype.R * rotation_z(angle * kDeg);
    ProjectedSet projected;
    try {
      projected = project_vertices(target, v);
    } catch (const ProjectionError& e) {
      throw ConfigurationError(fmt::format("target not in front of the camera at {} deg: {}", angle, e.what()));
    }
    out.contours.push_back(extract_silhouette(projected).as_curve());
    out.views.push_back(v);
  }
  return out;
}

std::vector<Curve2D> add_contour_noise(const std::vector<Curve2D>& contours, double sd, std::uint64_t seed) {
  if (!(sd >= 0.0)) throw ParameterError(fmt::format("noise SD must be nonnegative, got {}", sd));
  std::vector<Curve2D> out = contours;
  if (sd == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sd);
  for (auto& c : out) {
    for (auto& p : c.points) {
      p.x() += noise(rng);
      p.y() += noise(rng);
    }
  }
  return out;
}

SimilarityTransform perturb_initialization(int level, std::mt19937_64& rng, const Vec3& center) {
  const NoiseLevelSpec spec = noise_level(level);
  if (level == 0) return SimilarityTransform::identity();
  std::normal_distribution<double> rot(0.0, spec.rot_sd);
  std::normal_distribution<double> trans(0.0, spec.trans_sd);
  std::normal_distribution<double> scale(1.0, spec.scale - 1.0);
  const double ax = rot(rng);
  const double ay = rot(rng);
  const double az = rot(rng);
  Vec3 delta;
  for (int i = 0; i < 3; ++i) delta[i] = trans(rng);
  double s = scale(rng);
  while (!(s > 0.0)) s = scale(rng);

  SimilarityTransform xf;
  xf.scale = s;
  xf.rotation = rotation_z(az) * rotation_y(ay) * rotation_x(ax);
  xf.translation = center + delta - s * (xf.rotation * center);
  return xf;
}

SimilarityTransform perturb_initialization(int level, std::uint64_t seed, const Vec3& center) {
  std::mt19937_64 rng(seed);
  return perturb_initialization(level, rng, center);
}

Mesh fit_template(const Mesh& target, int refinement_level) {
  const SphereFit fit = fit_sphere(target.vertices);
  Vec3 mean = Vec3::Zero();
  for (const auto& v : target.vertices) mean += v;
  mean /= static_cast<double>(target.vertices.size());
  Vec3 axis = mean - fit.center;
  axis = axis.norm() > 1e-9 * fit.radius ? axis.normalized() : Vec3::UnitZ();
  SimilarityTransform xf;
  xf.scale = fit.radius;
  xf.rotation = rotation_between(Vec3::UnitZ(), axis);
  xf.translation = fit.center;
  return apply_similarity(generate_hemisphere(1.0, refinement_level), xf);
}

Metrics metrics_from_errors(std::vector<double> errors) {
  Metrics m;
  m.errors = std::move(errors);
  if (m.errors.empty()) return m;
  double sum = 0.0;
  for (double e : m.errors) sum += e;
  m.mae = sum / static_cast<double>(m.errors.size());
  double ss = 0.0;
  for (double e : m.errors) ss += (e - m.mae) * (e - m.mae);
  m.sd = std::sqrt(ss / static_cast<double>(m.errors.size()));
  return m;
}

Metrics evaluate_reconstruction(const Mesh& recon, const Mesh& target) {
  if (recon.empty() || target.empty()) throw ParameterError("evaluation needs non-empty meshes");
  const SurfaceDistanceQuery query(target);
  std::vector<double> errors;
  errors.reserve(recon.vertices.size());
  for (const auto& v : recon.vertices) errors.push_back(query.distance(v));
  return metrics_from_errors(std::move(errors));
}

std::uint64_t run_seed(std::uint64_t master, int level, int run) {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ static_cast<std::uint64_t>(level));
  return splitmix64(s ^ (static_cast<std::uint64_t>(run) << 8));
}

Mesh load_or_make_target(const ExperimentConfig& cfg) {
  return cfg.target_path.empty() ? make_synthetic_target(cfg.target) : read_mesh(cfg.target_path);
}

SimulatedCase simulate_case(const ExperimentConfig& cfg, const Mesh& target, int level, int run) {
  std::mt19937_64 rng(run_seed(cfg.seed, level, run));
  SimulatedCase c;
  c.target = target;
  const SyntheticViews sv = synthesize_views(target, cfg.view_angles_deg, cfg.camera);
  c.views = sv.views;
  c.ground_truth = sv.contours;
  c.fitted_template = fit_template(target, cfg.template_level);
  c.perturbation = perturb_initialization(level, rng, fit_sphere(target.vertices).center);
  c.initial_template = apply_similarity(c.fitted_template, c.perturbation);
  c.observations = add_contour_noise(c.ground_truth, cfg.contour_noise_sd, rng());
  return c;
}

RunRecord run_single(const ExperimentConfig& cfg, const Mesh& target, int level, int run, StrategyTag strategy) {
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.level = level;
  rec.run = run;
  rec.strategy = strategy;
  rec.seed = run_seed(cfg.seed, level, run);
  try {
    rec.target_cup_diameter = estimate_cup_diameter(target);
    const SimulatedCase c = simulate_case(cfg, target, level, run);
    rec.initial_mae = evaluate_reconstruction(c.initial_template, target).mae;
    ReconstructionConfig solver = cfg.solver;
    solver.strategy.tag = strategy;
    const ReconstructionResult result = reconstruct(c.initial_template, c.observations, c.views, solver);
    rec.outer_iterations = result.outer_iterations;
    rec.gn_iterations = result.gn_iterations;
    rec.recorrespondences = result.recorrespondences;
    rec.converged = result.converged;
    Metrics metrics = evaluate_reconstruction(result.mesh, target);
    rec.mae = metrics.mae;
    rec.sd = metrics.sd;
    rec.errors = std::move(metrics.errors);
    rec.cup_diameter = estimate_cup_diameter(result.mesh);
  } catch (const Error& e) {
    rec.failed = true;
    rec.message = e.what();
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::vector<RunRecord> run_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  const Mesh target = load_or_make_target(cfg);
  std::vector<RunRecord> records;
  for (int level : cfg.levels) {
    for (int run = 0; run < cfg.runs; ++run) {
      for (StrategyTag strategy : cfg.strategies) records.push_back(run_single(cfg, target, level, run, strategy));
    }
  }
  return records;
}

}  // namespace acetrec
