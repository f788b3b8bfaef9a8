// aortamesh command-line front end. Exit codes: 0 success, 1 usage,
// 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "aortamesh/analysis.hpp"
#include "aortamesh/config.hpp"
#include "aortamesh/csv_io.hpp"
#include "aortamesh/error.hpp"
#include "aortamesh/file_util.hpp"
#include "aortamesh/landmarks_io.hpp"
#include "aortamesh/marching_cubes.hpp"
#include "aortamesh/pipeline.hpp"
#include "aortamesh/surface_io.hpp"
#include "aortamesh/synthetic.hpp"
#include "aortamesh/vtk_io.hpp"

namespace fs = std::filesystem;
using namespace aorta;

namespace {

constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kNumerical = 3;

// Shared --config / --set plumbing plus shorthand flags for common tunables.
struct ConfigFlags {
  std::string config;
  std::vector<std::string> sets;
  struct Shorthand {
    const char* flag;
    const char* key;
    const char* help;
    std::string value;
  };
  std::vector<Shorthand> shorthands{
      {"--n-sections", "template.n_sections", "Cross-sections along the centerline", {}},
      {"--n-ring", "template.n_ring", "Points per cross-section", {}},
      {"--max-iters", "fit.max_iters", "Fitting iteration cap", {}},
      {"--samples", "fit.sample_count", "Target surface sample count", {}},
      {"--seed", "fit.seed", "Sampling seed", {}},
      {"--thickness", "solid.thickness", "Wall thickness (mm)", {}},
      {"--layers", "solid.layers", "Element layers through the wall", {}},
      {"--pressure", "simulation.pressure", "Luminal pressure (kPa)", {}},
      {"--tolerance", "simulation.tolerance", "PCG relative residual", {}},
      {"--youngs-modulus", "material.youngs_modulus", "Young's modulus (kPa)", {}},
      {"--poisson-ratio", "material.poisson_ratio", "Poisson ratio", {}},
      {"--patient-id", "patient_id", "Patient identifier for stats rows", {}},
      {"--group", "group", "Cohort group (control or aneurysm)", {}},
  };

  void attach(CLI::App* app) {
    app->add_option("--config", config, "Pipeline configuration JSON")->check(CLI::ExistingFile);
    app->add_option("--set", sets, "Override a config key, e.g. fit.max_iters=200 (repeatable)");
    for (auto& s : shorthands) app->add_option(s.flag, s.value, s.help);
  }

  io::PipelineConfig load() const {
    std::vector<std::string> overrides = sets;
    for (const auto& s : shorthands) {
      if (!s.value.empty()) {
        // Strings that are not valid JSON fall back to plain strings in the parser.
        overrides.push_back(std::string(s.key) + "=" + s.value);
      }
    }
    return io::load_config(config, overrides);
  }
};

int run_ingest(const std::string& mask, const std::string& out, const ConfigFlags& flags) {
  const auto cfg = flags.load();
  const auto surface = io::mask_to_surface(io::read_mask(mask), cfg.iso, cfg.iso_smoothing);
  io::write_surface(out, surface);
  std::cout << "wrote " << out << " (" << surface.triangles.size() << " triangles, area "
            << surface_area(surface) << " mm^2)\n";
  return 0;
}

int run_template(const std::string& landmarks, const std::string& surface, const std::string& out,
                 const ConfigFlags& flags) {
  const auto cfg = flags.load();
  const auto lm = io::read_landmarks(landmarks);
  const auto target = pipeline::prepare_target(io::read_surface(surface), cfg);
  const auto t = pipeline::build_template(lm, target, cfg);
  io::write_quad_vtk(out, {t.mesh, t.centerline.points});
  std::cout << "wrote " << out << " (" << t.mesh.vertices.size() << " vertices, " << t.mesh.quads.size()
            << " quads, " << t.mesh.hole_loops.size() << " holes)\n";
  return 0;
}

int run_fit(const std::string& templ, const std::string& surface, const std::string& out, const std::string& loss,
            const ConfigFlags& flags) {
  const auto cfg = flags.load();
  const auto doc = io::read_quad_vtk(templ);
  const auto target = pipeline::prepare_target(io::read_surface(surface), cfg);
  const auto result = pipeline::fit(doc.mesh, target, cfg);
  io::write_quad_vtk(out, {result.mesh, doc.centerline});
  if (!loss.empty()) io::write_loss_history(loss, result.report);
  std::cout << "wrote " << out << " after " << result.report.iterations_run << " iterations, chamfer rms "
            << result.report.final_chamfer_rms << " mm (" << fit::to_string(result.report.terminated_by) << ")\n";
  return 0;
}

int run_solidify(const std::string& mesh, const std::string& out, const std::string& quality_csv,
                 const ConfigFlags& flags) {
  const auto cfg = flags.load();
  const auto doc = io::read_quad_vtk(mesh);
  const auto hex = pipeline::solidify(doc.mesh, cfg);
  const auto quality = solid::hex_quality(hex);
  io::HexDocument out_doc{hex, doc.centerline, {}};
  out_doc.fields.scaled_jacobian = quality.scaled_jacobian;
  io::write_hex_vtk(out, out_doc);
  if (!quality_csv.empty()) io::write_hex_quality_csv(quality_csv, quality);
  std::cout << "wrote " << out << " (" << hex.nodes.size() << " nodes, " << hex.hexes.size()
            << " hexes); min scaled jacobian " << quality.min_scaled_jacobian << ", inverted "
            << quality.inverted_count << "\n";
  return 0;
}

int run_simulate(const std::string& mesh, const std::string& out, const ConfigFlags& flags) {
  const auto cfg = flags.load();
  auto doc = io::read_hex_vtk(mesh);
  const auto result = pipeline::simulate(doc.mesh, cfg);
  doc.fields.max_abs_principal = result.max_abs_principal;
  doc.fields.stress = result.element_stress;
  doc.fields.displacement = result.displacements;
  io::write_hex_vtk(out, doc);
  std::cout << "wrote " << out << "; " << result.solver_stats.iterations << " PCG iterations, residual "
            << result.solver_stats.final_residual << ", equilibrium error " << result.equilibrium_error() << "\n";
  return 0;
}

int run_stats(const std::string& result_path, const std::string& landmarks, const std::string& out,
              const ConfigFlags& flags) {
  const auto cfg = flags.load();
  const auto doc = io::read_hex_vtk(result_path);
  if (doc.fields.max_abs_principal.size() != doc.mesh.hexes.size()) {
    throw Error(ErrorKind::InvalidArgument, result_path + " carries no max_abs_principal_stress_kPa cell data");
  }
  if (doc.centerline.empty()) throw Error(ErrorKind::InvalidArgument, result_path + " carries no centerline");
  std::optional<LandmarkSet> lm;
  if (!landmarks.empty()) lm = io::read_landmarks(landmarks);
  const auto bp = pipeline::resolve_breakpoints(cfg, lm ? &*lm : nullptr, doc.centerline);
  const auto record = pipeline::stats(doc.mesh, doc.fields.max_abs_principal, doc.centerline, bp, cfg);
  io::write_stats_csv(out, {record});
  std::cout << "wrote " << out << "; peak " << record.stats.peak << " kPa\n";
  return 0;
}

int run_pipeline(const std::string& out_dir, const ConfigFlags& flags) {
  auto cfg = flags.load();
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  const auto out = pipeline::run(cfg, &std::cout);
  std::cout << "wrote " << out.fitted_vtk.string() << ", " << out.hex_vtk.string() << ", " << out.result_vtk.string()
            << ", " << out.stats_csv.string() << "\n";
  return 0;
}

int run_cohort(const std::vector<std::string>& stats_files, const std::string& out) {
  std::vector<analysis::PatientRecord> patients;
  for (const auto& f : stats_files) {
    auto rows = io::read_stats_csv(f);
    patients.insert(patients.end(), rows.begin(), rows.end());
  }
  const auto summary = analysis::cohort_table(patients);
  io::write_cohort_csv(out, summary);
  std::cout << "wrote " << out << " (" << patients.size() << " patients, " << summary.groups.size() << " groups)\n";
  return 0;
}

// Synthetic bulged tube with one branch ostium, plus a small-grid config.
int run_synth(const std::string& out_dir, double length, double base, double bulge, double center, double sigma) {
  const fs::path dir(out_dir);
  const auto profile = synth::gaussian_bulge(base, bulge, center, sigma);
  const auto surface = synth::tube_surface(profile, length, 121, 72);
  io::write_stl(dir / "bulged_tube.stl", surface);
  auto lm = synth::tube_landmarks(profile, length, 151, false);
  lm.arch_curves.push_back(synth::wall_curve(profile, 0.83 * length, 1.2, 4.5, 16));
  io::write_landmarks(dir / "landmarks.json", lm);

  io::PipelineConfig cfg;
  cfg.patient_id = "demo";
  cfg.group = "aneurysm";
  cfg.inputs.surface = "bulged_tube.stl";
  cfg.inputs.landmarks = "landmarks.json";
  cfg.out_dir = "demo_out";
  cfg.templ.n_sections = 48;
  cfg.templ.n_ring = 24;
  cfg.fit.max_iters = 300;
  cfg.fit.sample_count = 20000;
  std::string json = io::config_to_json(cfg);
  // Drop the empty mask entry so the demo reads only the surface.
  const std::string empty_mask = "\"mask\": \"\",";
  if (const auto pos = json.find(empty_mask); pos != std::string::npos) {
    auto line_start = json.rfind('\n', pos);
    json.erase(line_start, pos + empty_mask.size() - line_start);
  }
  io::write_file_atomic(dir / "demo.json", json);
  std::cout << "wrote " << (dir / "bulged_tube.stl").string() << ", " << (dir / "landmarks.json").string() << ", "
            << (dir / "demo.json").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aortamesh: template meshing and wall-stress analysis of the thoracic aorta"};
  app.require_subcommand(1);

  ConfigFlags flags;
  std::string in_a, in_b, out, extra, landmarks, out_dir;
  std::vector<std::string> files;
  double length = 150.0, base = 12.0, bulge = 10.0, center = 60.0, sigma = 25.0;

  auto* ingest = app.add_subcommand("ingest", "Voxel mask -> target surface (STL/OBJ)");
  ingest->add_option("--mask", in_a, "Mask header JSON")->required()->check(CLI::ExistingFile);
  ingest->add_option("--out", out, "Output surface (.stl or .obj)")->required();
  flags.attach(ingest);

  auto* templ = app.add_subcommand("template", "Landmarks + surface -> template quad VTK");
  templ->add_option("--landmarks", landmarks, "Landmark JSON")->required()->check(CLI::ExistingFile);
  templ->add_option("--surface", in_b, "Target surface")->required()->check(CLI::ExistingFile);
  templ->add_option("--out", out, "Output quad VTK")->required();
  flags.attach(templ);

  auto* fit = app.add_subcommand("fit", "Template + surface -> fitted quad VTK and loss CSV");
  fit->add_option("--template", in_a, "Template quad VTK")->required()->check(CLI::ExistingFile);
  fit->add_option("--surface", in_b, "Target surface")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", out, "Output quad VTK")->required();
  fit->add_option("--loss", extra, "Loss history CSV");
  flags.attach(fit);

  auto* solidify = app.add_subcommand("solidify", "Fitted quad VTK -> hex VTK and quality report");
  solidify->add_option("--mesh", in_a, "Fitted quad VTK")->required()->check(CLI::ExistingFile);
  solidify->add_option("--out", out, "Output hex VTK")->required();
  solidify->add_option("--quality", extra, "Per-element scaled Jacobian CSV");
  flags.attach(solidify);

  auto* simulate = app.add_subcommand("simulate", "Hex VTK -> result VTK with stress cell data");
  simulate->add_option("--mesh", in_a, "Hex VTK")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out, "Output result VTK")->required();
  flags.attach(simulate);

  auto* stats = app.add_subcommand("stats", "Result VTK + regions -> stats CSV");
  stats->add_option("--result", in_a, "Result VTK")->required()->check(CLI::ExistingFile);
  stats->add_option("--landmarks", landmarks, "Landmark JSON (breakpoints / arch curves)")->check(CLI::ExistingFile);
  stats->add_option("--out", out, "Output stats CSV")->required();
  flags.attach(stats);

  auto* pipe = app.add_subcommand("pipeline", "All stages for one patient");
  pipe->add_option("--out-dir", out_dir, "Output directory (overrides out_dir)");
  flags.attach(pipe);

  auto* cohort = app.add_subcommand("cohort", "Per-patient stats CSVs -> cohort summary CSV");
  cohort->add_option("--stats", files, "Stats CSV files")->required()->check(CLI::ExistingFile);
  cohort->add_option("--out", out, "Output cohort CSV")->required();

  auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic bulged-tube demo case");
  synth_cmd->add_option("--out-dir", out_dir, "Output directory")->required();
  synth_cmd->add_option("--length", length, "Tube length (mm)");
  synth_cmd->add_option("--base-radius", base, "Base radius (mm)");
  synth_cmd->add_option("--bulge", bulge, "Bulge amplitude (mm)");
  synth_cmd->add_option("--bulge-center", center, "Bulge center height (mm)");
  synth_cmd->add_option("--bulge-sigma", sigma, "Bulge width (mm)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*ingest) return run_ingest(in_a, out, flags);
    if (*templ) return run_template(landmarks, in_b, out, flags);
    if (*fit) return run_fit(in_a, in_b, out, extra, flags);
    if (*solidify) return run_solidify(in_a, out, extra, flags);
    if (*simulate) return run_simulate(in_a, out, flags);
    if (*stats) return run_stats(in_a, landmarks, out, flags);
    if (*pipe) return run_pipeline(out_dir, flags);
    if (*cohort) return run_cohort(files, out);
    if (*synth_cmd) return run_synth(out_dir, length, base, bulge, center, sigma);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return is_numerical(e.kind()) ? kNumerical : kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}
