#pragma once

#include "acetrec/reconstruct.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace acetrec {

/// Initialization noise for one level. `scale` is the listed multiplier v;
/// the drawn scale is N(1, (v - 1)^2).
struct NoiseLevelSpec {
  double rot_sd = 0.0;    ///< rad, per Euler angle
  double trans_sd = 0.0;  ///< mm, per axis
  double scale = 1.0;
};

/// Level 0 is noise-free; levels 1..5 follow the fixed table.
NoiseLevelSpec noise_level(int level);

/// Synthetic default target.
struct TargetSpec {
  double radius = 25.0;
  int level = 5;
  Vec3 axis_scale{1.12, 1.0, 0.96};
  double bump_amplitude = 2.0;  ///< mm, radial
  double bump_sigma = 8.0;      ///< mm
  double inclination_deg = 40.0;
  double anteversion_deg = 20.0;
};

struct ExperimentConfig {
  std::string target_path;  ///< empty: synthetic target from `target`
  TargetSpec target;
  int template_level = 4;
  std::vector<double> view_angles_deg = {0.0, 20.0, -20.0};
  View camera = default_camera();
  double contour_noise_sd = 2.0;  ///< px
  std::vector<int> levels = {1, 2, 3, 4, 5};
  int runs = 10;
  std::uint64_t seed = 20240601;
  std::vector<StrategyTag> strategies = {StrategyTag::Srvf};
  ReconstructionConfig solver;

  static View default_camera();
  void validate() const;
};

/// Rotation about the model z-axis (the body's longitudinal axis).
Mat3 rotation_z(double radians);

/// The warped-hemisphere target, posed and centred on the sphere centre.
Mesh make_synthetic_target(const TargetSpec& spec);
/// Unit outward direction of the cup opening for a pose.
Vec3 cup_opening_direction(double inclination_deg, double anteversion_deg);

struct SyntheticViews {
  std::vector<View> views;
  std::vector<Curve2D> contours;  ///< ground truth, one per view
};

/// One view per angle: R_k = R_proto * Rz(angle), t_k = t_proto. Depth
/// failures become ConfigurationError.
SyntheticViews synthesize_views(const Mesh& target, const std::vector<double>& angles_deg, const View& prototype);

/// Adds independent N(0, sd^2) noise to every coordinate.
std::vector<Curve2D> add_contour_noise(const std::vector<Curve2D>& contours, double sd, std::uint64_t seed);

/// Random similarity for `level`, drawn from `rng` (three Euler angles
/// R = Rz Ry Rx, then translation, then scale; non-positive scales redrawn).
/// The rotation and scaling act about `center`.
SimilarityTransform perturb_initialization(int level, std::mt19937_64& rng, const Vec3& center = Vec3::Zero());
SimilarityTransform perturb_initialization(int level, std::uint64_t seed, const Vec3& center = Vec3::Zero());

/// Hemisphere template fitted to a target: sphere centre and radius, axis
/// from the centre towards the vertex mean.
Mesh fit_template(const Mesh& target, int refinement_level);

struct Metrics {
  double mae = 0.0;
  double sd = 0.0;  ///< population standard deviation
  std::vector<double> errors;
};

Metrics evaluate_reconstruction(const Mesh& recon, const Mesh& target);
Metrics metrics_from_errors(std::vector<double> errors);

/// Deterministic per-run seed from (master seed, level, run).
std::uint64_t run_seed(std::uint64_t master, int level, int run);

struct SimulatedCase {
  Mesh target;
  Mesh fitted_template;
  Mesh initial_template;  ///< fitted template after the perturbation
  SimilarityTransform perturbation;
  std::vector<View> views;
  std::vector<Curve2D> observations;  ///< noisy
  std::vector<Curve2D> ground_truth;
};

Mesh load_or_make_target(const ExperimentConfig& cfg);
SimulatedCase simulate_case(const ExperimentConfig& cfg, const Mesh& target, int level, int run);

struct RunRecord {
  int level = 0;
  int run = 0;
  StrategyTag strategy = StrategyTag::Srvf;
  std::uint64_t seed = 0;
  double initial_mae = 0.0;
  double mae = 0.0;
  double sd = 0.0;
  double cup_diameter = 0.0;
  double target_cup_diameter = 0.0;
  int outer_iterations = 0;
  int gn_iterations = 0;
  int recorrespondences = 0;
  bool converged = false;
  bool failed = false;
  std::string message;
  double wall_time = 0.0;
  std::vector<double> errors;  ///< per-vertex, empty on failure
};

/// Simulate, reconstruct with `strategy`, evaluate. Failures are caught and
/// recorded in the returned row.
RunRecord run_single(const ExperimentConfig& cfg, const Mesh& target, int level, int run, StrategyTag strategy);

/// Every (level, run, strategy) in config order.
std::vector<RunRecord> run_suite(const ExperimentConfig& cfg);

}  // namespace acetrec
