// acetrec: command-line front end (simulate / reconstruct / evaluate / suite / cupsize).

#include "acetrec/config.hpp"
#include "acetrec/ed_graph.hpp"
#include "acetrec/errors.hpp"
#include "acetrec/experiment.hpp"
#include "acetrec/mesh_io.hpp"
#include "acetrec/reconstruct.hpp"
#include "acetrec/report.hpp"
#include "acetrec/sphere_fit.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace acetrec;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::vector<int> levels;
  std::vector<std::string> strategies;
  std::optional<double> noise_sd;
  std::optional<int> nodes;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master RNG seed");
  cmd->add_option("--strategy", o.strategies, "srvf | icp | icp-normvec (repeatable)");
  cmd->add_option("--noise-sd", o.noise_sd, "contour noise SD in px");
  cmd->add_option("--nodes", o.nodes, "deformation graph node count");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_experiment_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.runs) cfg.runs = *o.runs;
  if (!o.levels.empty()) cfg.levels = o.levels;
  if (o.noise_sd) cfg.contour_noise_sd = *o.noise_sd;
  if (o.nodes) cfg.solver.n_nodes = *o.nodes;
  if (!o.strategies.empty()) {
    cfg.strategies.clear();
    for (const auto& s : o.strategies) cfg.strategies.push_back(parse_strategy(s));
  }
  cfg.solver.strategy.tag = cfg.strategies.front();
  cfg.validate();
  return cfg;
}

void write_metrics_json(const std::string& path, const Metrics& m) {
  json doc{{"mae_mm", m.mae}, {"sd_mm", m.sd}, {"vertices", m.errors.size()}};
  write_text_file(path, doc.dump(2) + "\n");
}

int cmd_simulate(const Overrides& o, int level, int run, const std::string& out_dir) {
  const ExperimentConfig cfg = resolve(o);
  const Mesh target = load_or_make_target(cfg);
  const SimulatedCase c = simulate_case(cfg, target, level, run);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_mesh((dir / "target.ply").string(), c.target);
  write_mesh((dir / "fitted_template.ply").string(), c.fitted_template);
  write_mesh((dir / "template.ply").string(), c.initial_template);
  write_views((dir / "views.json").string(), c.views);
  for (std::size_t k = 0; k < c.views.size(); ++k) {
    write_curve_csv((dir / fmt::format("contour_{}.csv", k)).string(), c.observations[k], static_cast<int>(k));
    write_curve_csv((dir / fmt::format("contour_gt_{}.csv", k)).string(), c.ground_truth[k], static_cast<int>(k));
  }
  json meta{{"level", level},
            {"run", run},
            {"seed", run_seed(cfg.seed, level, run)},
            {"perturbation", c.perturbation},
            {"initial_mae_mm", evaluate_reconstruction(c.initial_template, c.target).mae}};
  write_text_file((dir / "case.json").string(), meta.dump(2) + "\n");
  fmt::print("wrote case (level {}, run {}) to {}\n", level, run, out_dir);
  return 0;
}

int cmd_reconstruct(const Overrides& o, const std::string& template_path, const std::string& views_path,
                    const std::vector<std::string>& contours, const std::string& out_mesh,
                    const std::string& report_path, const std::string& target_path, const std::string& graph_dump) {
  const ExperimentConfig cfg = resolve(o);
  const Mesh tmpl = read_mesh(template_path);
  const std::vector<View> views = read_views(views_path);
  std::vector<Curve2D> observations(views.size());
  std::vector<bool> seen(views.size(), false);
  for (const auto& path : contours) {
    const LabeledCurve lc = read_curve_csv(path);
    if (lc.view < 0 || static_cast<std::size_t>(lc.view) >= views.size() || seen[static_cast<std::size_t>(lc.view)]) {
      throw ConfigurationError(fmt::format("{}: view index {} missing or repeated", path, lc.view));
    }
    observations[static_cast<std::size_t>(lc.view)] = lc.curve;
    seen[static_cast<std::size_t>(lc.view)] = true;
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (!seen[k]) throw ConfigurationError(fmt::format("no contour given for view {}", k));
  }
  if (!graph_dump.empty()) {
    write_text_file(graph_dump, graph_to_json(build_graph(tmpl, cfg.solver.n_nodes, cfg.solver.m)) + "\n");
  }

  const ReconstructionResult result = reconstruct(tmpl, observations, views, cfg.solver);
  std::optional<VertexScalar> scalar;
  if (!target_path.empty()) {
    const Metrics m = evaluate_reconstruction(result.mesh, read_mesh(target_path));
    scalar = VertexScalar{"error_mm", m.errors};
    fmt::print("MAE {:.4f} mm, SD {:.4f} mm\n", m.mae, m.sd);
  }
  if (fs::path(out_mesh).extension() == ".ply") {
    write_ply(out_mesh, result.mesh, scalar);
  } else {
    write_mesh(out_mesh, result.mesh);
  }
  if (!report_path.empty()) write_text_file(report_path, reconstruction_report_json(result) + "\n");
  fmt::print("{} after {} outer iterations ({} correspondence rounds), cost {:.6g}\n",
             result.converged ? "converged" : "stopped", result.outer_iterations, result.recorrespondences,
             result.final_cost);
  return 0;
}

int cmd_evaluate(const std::string& recon_path, const std::string& target_path, const std::string& out_ply,
                 const std::string& out_json) {
  const Mesh recon = read_mesh(recon_path);
  const Metrics m = evaluate_reconstruction(recon, read_mesh(target_path));
  if (!out_ply.empty()) write_ply(out_ply, recon, VertexScalar{"error_mm", m.errors});
  if (!out_json.empty()) write_metrics_json(out_json, m);
  fmt::print("MAE {:.4f} mm, SD {:.4f} mm over {} vertices\n", m.mae, m.sd, m.errors.size());
  return 0;
}

int cmd_suite(const Overrides& o, const std::string& csv_path, const std::string& svg_path) {
  const ExperimentConfig cfg = resolve(o);
  const Mesh target = load_or_make_target(cfg);
  std::vector<RunRecord> records;
  for (int level : cfg.levels) {
    for (int run = 0; run < cfg.runs; ++run) {
      for (StrategyTag s : cfg.strategies) {
        records.push_back(run_single(cfg, target, level, run, s));
        const auto& r = records.back();
        std::cerr << fmt::format("level {} run {} {}: {}\n", level, run, to_string(s),
                                 r.failed ? "FAILED " + r.message : fmt::format("MAE {:.3f} mm", r.mae));
      }
    }
  }
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot open " + csv_path);
  write_runs_csv(csv, records);
  if (!svg_path.empty()) {
    std::ofstream svg(svg_path);
    if (!svg) throw IoError("cannot open " + svg_path);
    write_error_boxplot_svg(svg, records);
  }
  fmt::print("{} runs written to {}\n", records.size(), csv_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acetabular surface reconstruction from calibrated X-ray contours"};
  app.require_subcommand(1);

  Overrides o;
  int level = 1, run = 0;
  std::string out_dir = "case";
  auto* sim = app.add_subcommand("simulate", "build a synthetic case (target, perturbed template, views, contours)");
  add_common(sim, o);
  sim->add_option("--level", level, "initialization noise level 0-5")->check(CLI::Range(0, 5));
  sim->add_option("--run", run, "run index (selects the RNG stream)");
  sim->add_option("-o,--out", out_dir, "output directory");

  std::string template_path, views_path, out_mesh = "reconstruction.ply", report_path, target_path, graph_dump;
  std::vector<std::string> contours;
  auto* rec = app.add_subcommand("reconstruct", "deform a template to match observed contours");
  add_common(rec, o);
  rec->add_option("--template", template_path, "template mesh (.ply/.obj)")->required()->check(CLI::ExistingFile);
  rec->add_option("--views", views_path, "views JSON")->required()->check(CLI::ExistingFile);
  rec->add_option("--contours", contours, "contour CSV files, one per view")->required()->check(CLI::ExistingFile);
  rec->add_option("-o,--out", out_mesh, "output mesh");
  rec->add_option("--report", report_path, "JSON report path");
  rec->add_option("--target", target_path, "ground-truth mesh; adds error_mm to the PLY")->check(CLI::ExistingFile);
  rec->add_option("--dump-graph", graph_dump, "write the initial deformation graph as JSON");

  std::string recon_path, eval_target, eval_ply, eval_json;
  auto* ev = app.add_subcommand("evaluate", "per-vertex surface distance of a reconstruction to a target");
  ev->add_option("recon", recon_path, "reconstructed mesh")->required()->check(CLI::ExistingFile);
  ev->add_option("target", eval_target, "target mesh")->required()->check(CLI::ExistingFile);
  ev->add_option("--ply", eval_ply, "write recon with error_mm vertex property");
  ev->add_option("--json", eval_json, "write MAE/SD JSON");

  std::string csv_path = "suite.csv", svg_path;
  auto* suite = app.add_subcommand("suite", "run the multi-level, multi-run synthetic protocol");
  add_common(suite, o);
  suite->add_option("--runs", o.runs, "runs per level");
  suite->add_option("--levels", o.levels, "noise levels")->delimiter(',');
  suite->add_option("--csv", csv_path, "per-run CSV output");
  suite->add_option("--svg", svg_path, "error box-plot SVG output");

  std::string cup_mesh;
  auto* cup = app.add_subcommand("cupsize", "cup diameter from a sphere fit");
  cup->add_option("mesh", cup_mesh, "acetabular mesh")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return cmd_simulate(o, level, run, out_dir);
    if (*rec) return cmd_reconstruct(o, template_path, views_path, contours, out_mesh, report_path, target_path, graph_dump);
    if (*ev) return cmd_evaluate(recon_path, eval_target, eval_ply, eval_json);
    if (*suite) return cmd_suite(o, csv_path, svg_path);
    if (*cup) {
      const SphereFit fit = fit_sphere(read_mesh(cup_mesh).vertices);
      fmt::print("diameter {:.4f} mm (radius {:.4f}, rms {:.4f})\n", 2.0 * fit.radius, fit.radius, fit.rms);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
