#include "acetrec/config.hpp"

#include "acetrec/errors.hpp"

#include <fmt/format.h>

#include <fstream>
#include <initializer_list>
#include <sstream>

namespace acetrec {

json mat3_to_json(const Mat3& m) {
  json j = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) j.push_back(m(r, c));
  }
  return j;
}

Mat3 mat3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 9) throw IoError("3x3 matrix must be a 9-element array");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) = j.at(static_cast<std::size_t>(3 * r + c)).get<double>();
  }
  return m;
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw IoError("3-vector must be a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void to_json(json& j, const View& view) {
  j = json{{"K", mat3_to_json(view.K)},
           {"R", mat3_to_json(view.R)},
           {"t", vec3_to_json(view.t)},
           {"width", view.width},
           {"height", view.height}};
}

void from_json(const json& j, View& view) {
  view.K = mat3_from_json(j.at("K"));
  view.R = mat3_from_json(j.at("R"));
  view.t = vec3_from_json(j.at("t"));
  view.width = j.value("width", 0);
  view.height = j.value("height", 0);
}

void to_json(json& j, const SimilarityTransform& xf) {
  j = json{{"scale", xf.scale}, {"rotation", mat3_to_json(xf.rotation)}, {"translation", vec3_to_json(xf.translation)}};
}

void from_json(const json& j, SimilarityTransform& xf) {
  xf.scale = j.at("scale").get<double>();
  xf.rotation = mat3_from_json(j.at("rotation"));
  xf.translation = vec3_from_json(j.at("translation"));
}

namespace {

void check_keys(const json& j, const char* what, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigurationError(fmt::format("{} must be a JSON object", what));
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed) known = known || item.key() == key;
    if (!known) throw ConfigurationError(fmt::format("unknown key '{}' in {}", item.key(), what));
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

std::string solver_name(LinearSolverKind kind) {
  switch (kind) {
    case LinearSolverKind::Dense: return "dense";
    case LinearSolverKind::Sparse: return "sparse";
    case LinearSolverKind::Auto: break;
  }
  return "auto";
}

LinearSolverKind parse_solver(const std::string& name) {
  if (name == "auto") return LinearSolverKind::Auto;
  if (name == "dense") return LinearSolverKind::Dense;
  if (name == "sparse") return LinearSolverKind::Sparse;
  throw ConfigurationError(fmt::format("unknown linear solver '{}'", name));
}

}  // namespace

void to_json(json& j, const ReconstructionConfig& cfg) {
  j = json{{"n_nodes", cfg.n_nodes},
           {"m", cfg.m},
           {"max_outer_iterations", cfg.max_outer_iterations},
           {"recorrespond_threshold", cfg.recorrespond_threshold},
           {"recorrespond_fraction", cfg.recorrespond_fraction},
           {"max_recorrespondences", cfg.max_recorrespondences},
           {"alpha", cfg.alpha},
           {"reinitialize_every_iteration", cfg.reinitialize_every_iteration},
           {"weights",
            {{"w_rot", cfg.weights.w_rot},
             {"w_reg", cfg.weights.w_reg},
             {"w_obs", cfg.weights.w_obs},
             {"normalize_per_view", cfg.weights.normalize_per_view}}},
           {"gn",
            {{"max_iterations", cfg.gn.max_iterations},
             {"tolerance", cfg.gn.tolerance},
             {"lambda0", cfg.gn.lambda0},
             {"lambda_max", cfg.gn.lambda_max},
             {"solver", solver_name(cfg.gn.solver)},
             {"dense_node_limit", cfg.gn.dense_node_limit}}},
           {"elastic",
            {{"samples", cfg.elastic.samples},
             {"grid", cfg.elastic.grid},
             {"max_rounds", cfg.elastic.max_rounds},
             {"tolerance", cfg.elastic.tolerance},
             {"start_stride", cfg.elastic.start_stride},
             {"window_fractions", cfg.elastic.window_fractions},
             {"smoothing", cfg.elastic.smoothing}}},
           {"strategy", to_string(cfg.strategy.tag)},
           {"normal_angle_deg", cfg.strategy.normal_angle_deg}};
}

void from_json(const json& j, ReconstructionConfig& cfg) {
  check_keys(j, "solver config",
             {"n_nodes", "m", "max_outer_iterations", "recorrespond_threshold", "recorrespond_fraction",
              "max_recorrespondences", "alpha", "reinitialize_every_iteration", "weights", "gn", "elastic", "strategy", "normal_angle_deg"});
  read_opt(j, "n_nodes", cfg.n_nodes);
  read_opt(j, "m", cfg.m);
  read_opt(j, "max_outer_iterations", cfg.max_outer_iterations);
  read_opt(j, "recorrespond_threshold", cfg.recorrespond_threshold);
  read_opt(j, "recorrespond_fraction", cfg.recorrespond_fraction);
  read_opt(j, "max_recorrespondences", cfg.max_recorrespondences);
  read_opt(j, "alpha", cfg.alpha);
  read_opt(j, "reinitialize_every_iteration", cfg.reinitialize_every_iteration);
  read_opt(j, "normal_angle_deg", cfg.strategy.normal_angle_deg);
  if (auto it = j.find("strategy"); it != j.end()) {
    try {
      cfg.strategy.tag = parse_strategy(it->get<std::string>());
    } catch (const ParameterError& e) {
      throw ConfigurationError(e.what());
    }
  }
  if (auto it = j.find("weights"); it != j.end()) {
    check_keys(*it, "weights", {"w_rot", "w_reg", "w_obs", "normalize_per_view"});
    read_opt(*it, "w_rot", cfg.weights.w_rot);
    read_opt(*it, "w_reg", cfg.weights.w_reg);
    read_opt(*it, "w_obs", cfg.weights.w_obs);
    read_opt(*it, "normalize_per_view", cfg.weights.normalize_per_view);
  }
  if (auto it = j.find("gn"); it != j.end()) {
    check_keys(*it, "gn", {"max_iterations", "tolerance", "lambda0", "lambda_max", "solver", "dense_node_limit"});
    read_opt(*it, "max_iterations", cfg.gn.max_iterations);
    read_opt(*it, "tolerance", cfg.gn.tolerance);
    read_opt(*it, "lambda0", cfg.gn.lambda0);
    read_opt(*it, "lambda_max", cfg.gn.lambda_max);
    read_opt(*it, "dense_node_limit", cfg.gn.dense_node_limit);
    if (auto s = it->find("solver"); s != it->end()) cfg.gn.solver = parse_solver(s->get<std::string>());
  }
  if (auto it = j.find("elastic"); it != j.end()) {
    check_keys(*it, "elastic", {"samples", "grid", "max_rounds", "tolerance", "start_stride", "window_fractions", "smoothing"});
    read_opt(*it, "samples", cfg.elastic.samples);
    read_opt(*it, "grid", cfg.elastic.grid);
    read_opt(*it, "max_rounds", cfg.elastic.max_rounds);
    read_opt(*it, "tolerance", cfg.elastic.tolerance);
    read_opt(*it, "start_stride", cfg.elastic.start_stride);
    read_opt(*it, "window_fractions", cfg.elastic.window_fractions);
    read_opt(*it, "smoothing", cfg.elastic.smoothing);
  }
}

void to_json(json& j, const ExperimentConfig& cfg) {
  json strategies = json::array();
  for (auto s : cfg.strategies) strategies.push_back(to_string(s));
  j = json{{"target_path", cfg.target_path},
           {"target",
            {{"radius", cfg.target.radius},
             {"level", cfg.target.level},
             {"axis_scale", vec3_to_json(cfg.target.axis_scale)},
             {"bump_amplitude", cfg.target.bump_amplitude},
             {"bump_sigma", cfg.target.bump_sigma},
             {"inclination_deg", cfg.target.inclination_deg},
             {"anteversion_deg", cfg.target.anteversion_deg}}},
           {"template_level", cfg.template_level},
           {"view_angles_deg", cfg.view_angles_deg},
           {"camera", cfg.camera},
           {"contour_noise_sd", cfg.contour_noise_sd},
           {"levels", cfg.levels},
           {"runs", cfg.runs},
           {"seed", cfg.seed},
           {"strategies", strategies},
           {"solver", cfg.solver}};
}

void from_json(const json& j, ExperimentConfig& cfg) {
  check_keys(j, "experiment config",
             {"target_path", "target", "template_level", "view_angles_deg", "camera", "contour_noise_sd", "levels",
              "runs", "seed", "strategies", "strategy", "solver"});
  read_opt(j, "target_path", cfg.target_path);
  read_opt(j, "template_level", cfg.template_level);
  read_opt(j, "view_angles_deg", cfg.view_angles_deg);
  read_opt(j, "contour_noise_sd", cfg.contour_noise_sd);
  read_opt(j, "levels", cfg.levels);
  read_opt(j, "runs", cfg.runs);
  read_opt(j, "seed", cfg.seed);
  if (auto it = j.find("camera"); it != j.end()) cfg.camera = it->get<View>();
  if (auto it = j.find("target"); it != j.end()) {
    check_keys(*it, "target",
               {"radius", "level", "axis_scale", "bump_amplitude", "bump_sigma", "inclination_deg", "anteversion_deg"});
    read_opt(*it, "radius", cfg.target.radius);
    read_opt(*it, "level", cfg.target.level);
    if (auto a = it->find("axis_scale"); a != it->end()) cfg.target.axis_scale = vec3_from_json(*a);
    read_opt(*it, "bump_amplitude", cfg.target.bump_amplitude);
    read_opt(*it, "bump_sigma", cfg.target.bump_sigma);
    read_opt(*it, "inclination_deg", cfg.target.inclination_deg);
    read_opt(*it, "anteversion_deg", cfg.target.anteversion_deg);
  }
  if (auto it = j.find("solver"); it != j.end()) cfg.solver = it->get<ReconstructionConfig>();
  try {
    std::vector<std::string> names;
    if (auto it = j.find("strategies"); it != j.end()) names = it->get<std::vector<std::string>>();
    if (auto it = j.find("strategy"); it != j.end()) names = {it->get<std::string>()};
    if (!names.empty()) {
      cfg.strategies.clear();
      for (const auto& n : names) cfg.strategies.push_back(parse_strategy(n));
    }
  } catch (const ParameterError& e) {
    throw ConfigurationError(e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(fmt::format("{}: {}", path, e.what()));
  }
}

ExperimentConfig load_experiment_config(const std::string& path) {
  ExperimentConfig cfg;
  try {
    from_json(read_json_file(path), cfg);
  } catch (const json::exception& e) {
    throw ConfigurationError(fmt::format("{}: {}", path, e.what()));
  }
  return cfg;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace acetrec
