#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "aortamesh/analysis.hpp"
#include "aortamesh/config.hpp"
#include "aortamesh/fea.hpp"
#include "aortamesh/fitting.hpp"
#include "aortamesh/geometry.hpp"
#include "aortamesh/solidify.hpp"
#include "aortamesh/spatial_index.hpp"

namespace aorta::pipeline {

/// Target surface with its sampled point cloud and index.
struct Target {
  TriangleSurface surface;
  KdTree index;
};

/// Surface from cfg.inputs.surface, else isosurface of cfg.inputs.mask.
TriangleSurface load_target_surface(const io::PipelineConfig& cfg);
/// Samples cfg.fit.sample_count points (seeded) and indexes them.
Target prepare_target(TriangleSurface surface, const io::PipelineConfig& cfg);

struct TemplateStage {
  tube::QuadMesh mesh;
  Centerline centerline;
};
TemplateStage build_template(const LandmarkSet& landmarks, const Target& target, const io::PipelineConfig& cfg);

fit::FitResult fit(const tube::QuadMesh& templ, const Target& target, const io::PipelineConfig& cfg);

solid::HexMesh solidify(const tube::QuadMesh& fitted, const io::PipelineConfig& cfg);

fea::FEAResult simulate(const solid::HexMesh& mesh, const io::PipelineConfig& cfg);

/// Breakpoints from the config, then the landmarks, then the defaults.
analysis::Breakpoints resolve_breakpoints(const io::PipelineConfig& cfg, const LandmarkSet* landmarks,
                                          std::span<const Vec3> centerline);

analysis::PatientRecord stats(const solid::HexMesh& mesh, std::span<const double> max_abs_principal,
                              std::span<const Vec3> centerline, const analysis::Breakpoints& breakpoints,
                              const io::PipelineConfig& cfg);

struct PipelineOutputs {
  std::filesystem::path template_vtk;
  std::filesystem::path fitted_vtk;
  std::filesystem::path loss_csv;
  std::filesystem::path hex_vtk;
  std::filesystem::path quality_csv;
  std::filesystem::path result_vtk;
  std::filesystem::path stats_csv;
  fit::FitReport fit_report;
  analysis::PatientRecord record;
  fea::SolverStats solver;
  double equilibrium_error = 0.0;
};

/// All stages for one patient; artifacts are written into cfg.out_dir.
/// Progress lines go to `log` when given.
PipelineOutputs run(const io::PipelineConfig& cfg, std::ostream* log = nullptr);

}  // namespace aorta::pipeline
