#include "aortamesh/pipeline.hpp"

#include "aortamesh/csv_io.hpp"
#include "aortamesh/error.hpp"
#include "aortamesh/landmarks_io.hpp"
#include "aortamesh/marching_cubes.hpp"
#include "aortamesh/sampling.hpp"
#include "aortamesh/surface_io.hpp"
#include "aortamesh/tube_template.hpp"
#include "aortamesh/vtk_io.hpp"

namespace aorta::pipeline {

TriangleSurface load_target_surface(const io::PipelineConfig& cfg) {
  if (!cfg.inputs.surface.empty()) return io::read_surface(cfg.inputs.surface);
  if (!cfg.inputs.mask.empty()) return io::mask_to_surface(io::read_mask(cfg.inputs.mask), cfg.iso, cfg.iso_smoothing);
  throw Error(ErrorKind::InvalidArgument, "no target given: set inputs.surface or inputs.mask");
}

Target prepare_target(TriangleSurface surface, const io::PipelineConfig& cfg) {
  validate(surface);
  auto samples = io::sample_surface(surface, cfg.fit.sample_count, cfg.fit.seed);
  return Target{std::move(surface), KdTree(std::move(samples))};
}

TemplateStage build_template(const LandmarkSet& landmarks, const Target& target, const io::PipelineConfig& cfg) {
  TemplateStage out;
  out.centerline = tube::template_centerline(landmarks, target.index, cfg.templ);
  out.mesh = tube::build_template(landmarks, target.index, cfg.templ);
  return out;
}

fit::FitResult fit(const tube::QuadMesh& templ, const Target& target, const io::PipelineConfig& cfg) {
  return fit::fit_template(templ, target.index, cfg.fit);
}

solid::HexMesh solidify(const tube::QuadMesh& fitted, const io::PipelineConfig& cfg) {
  return solid::extrude_to_hex(fitted, cfg.thickness, cfg.layers);
}

fea::FEAResult simulate(const solid::HexMesh& mesh, const io::PipelineConfig& cfg) {
  return fea::run_sda(mesh, cfg.pressure, cfg.material, cfg.bcs, cfg.tolerance);
}

analysis::Breakpoints resolve_breakpoints(const io::PipelineConfig& cfg, const LandmarkSet* landmarks,
                                          std::span<const Vec3> centerline) {
  if (cfg.breakpoints) return *cfg.breakpoints;
  if (landmarks && landmarks->region_breakpoints) return *landmarks->region_breakpoints;
  return analysis::default_breakpoints(landmarks ? *landmarks : LandmarkSet{}, centerline);
}

analysis::PatientRecord stats(const solid::HexMesh& mesh, std::span<const double> max_abs_principal,
                              std::span<const Vec3> centerline, const analysis::Breakpoints& breakpoints,
                              const io::PipelineConfig& cfg) {
  const auto partition = analysis::assign_regions(mesh, centerline, breakpoints);
  return {cfg.patient_id, cfg.group, analysis::region_stats(max_abs_principal, partition)};
}

PipelineOutputs run(const io::PipelineConfig& cfg, std::ostream* log) {
  validate(cfg);
  const auto say = [log](const std::string& msg) {
    if (log) *log << msg << '\n';
  };
  if (cfg.inputs.landmarks.empty()) throw Error(ErrorKind::InvalidArgument, "inputs.landmarks is required");
  const auto landmarks = io::read_landmarks(cfg.inputs.landmarks);
  const Target target = prepare_target(load_target_surface(cfg), cfg);
  say("target: " + std::to_string(target.surface.triangles.size()) + " triangles, " +
      std::to_string(target.index.size()) + " samples");

  PipelineOutputs out;
  const auto& dir = cfg.out_dir;
  out.template_vtk = dir / "template.vtk";
  out.fitted_vtk = dir / "fitted.vtk";
  out.loss_csv = dir / "loss_history.csv";
  out.hex_vtk = dir / "hex.vtk";
  out.quality_csv = dir / "hex_quality.csv";
  out.result_vtk = dir / "result.vtk";
  out.stats_csv = dir / "stats.csv";

  const auto templ = build_template(landmarks, target, cfg);
  const auto& spine = templ.centerline.points;
  io::write_quad_vtk(out.template_vtk, {templ.mesh, spine});
  say("template: " + std::to_string(templ.mesh.vertices.size()) + " vertices, " +
      std::to_string(templ.mesh.quads.size()) + " quads");

  auto fitted = fit(templ.mesh, target, cfg);
  io::write_quad_vtk(out.fitted_vtk, {fitted.mesh, spine});
  io::write_loss_history(out.loss_csv, fitted.report);
  out.fit_report = fitted.report;
  say("fit: " + std::to_string(fitted.report.iterations_run) + " iterations, chamfer rms " +
      std::to_string(fitted.report.final_chamfer_rms) + " mm (" + fit::to_string(fitted.report.terminated_by) + ")");

  const auto hex = solidify(fitted.mesh, cfg);
  const auto quality = solid::hex_quality(hex);
  io::HexDocument doc{hex, spine, {}};
  doc.fields.scaled_jacobian = quality.scaled_jacobian;
  io::write_hex_vtk(out.hex_vtk, doc);
  io::write_hex_quality_csv(out.quality_csv, quality);
  say("solidify: " + std::to_string(hex.nodes.size()) + " nodes, " + std::to_string(hex.hexes.size()) +
      " hexes, min scaled jacobian " + std::to_string(quality.min_scaled_jacobian));

  const auto result = simulate(hex, cfg);
  out.solver = result.solver_stats;
  out.equilibrium_error = result.equilibrium_error();
  doc.fields.max_abs_principal = result.max_abs_principal;
  doc.fields.stress = result.element_stress;
  doc.fields.displacement = result.displacements;
  io::write_hex_vtk(out.result_vtk, doc);
  say("simulate: " + std::to_string(result.solver_stats.iterations) + " PCG iterations, equilibrium error " +
      std::to_string(out.equilibrium_error));

  const auto bp = resolve_breakpoints(cfg, &landmarks, spine);
  out.record = stats(hex, result.max_abs_principal, spine, bp, cfg);
  io::write_stats_csv(out.stats_csv, {out.record});
  say("stats: peak " + std::to_string(out.record.stats.peak) + " kPa");
  return out;
}

}  // namespace aorta::pipeline
