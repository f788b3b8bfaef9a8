#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "aortamesh/analysis.hpp"
#include "aortamesh/fea.hpp"
#include "aortamesh/fitting.hpp"
#include "aortamesh/tube_template.hpp"

namespace aorta::io {

struct InputPaths {
  std::filesystem::path mask;       // voxel mask header; used when no surface is given
  std::filesystem::path surface;    // target surface (.stl / .obj)
  std::filesystem::path landmarks;  // landmark JSON
};

/// Every tunable of the pipeline, with library defaults.
struct PipelineConfig {
  std::string patient_id = "patient";
  std::string group = "control";
  InputPaths inputs;
  std::filesystem::path out_dir = "out";

  double iso = 0.5;
  std::size_t iso_smoothing = 20;
  tube::TemplateConfig templ;
  fit::FitConfig fit;
  double thickness = 2.0;  // mm
  std::size_t layers = 2;
  fea::Material material;
  double pressure = 16.0;   // kPa
  double tolerance = 1e-8;  // PCG relative residual
  fea::BoundaryConditions bcs;
  std::optional<analysis::Breakpoints> breakpoints;
};

/// Throws Error(InvalidArgument / InvalidBreakpoints) on out-of-range values.
void validate(const PipelineConfig& cfg);

/// JSON layout:
///   { "patient_id", "group", "out_dir",
///     "inputs":     { "surface", "mask", "landmarks" },
///     "ingest":     { "iso", "smoothing_iterations" },
///     "template":   { "n_sections", "n_ring", "max_plane_distance" },
///     "fit":        { "max_iters", "step_size", "stop_rel_change", "stop_window",
///                     "target_chamfer_rms", "sample_count", "seed", "smoothing_lambda",
///                     "weights": { "chamfer", "area", "flatness", "angle", "edge" } },
///     "solid":      { "thickness", "layers" },
///     "material":   { "youngs_modulus", "poisson_ratio" },
///     "simulation": { "pressure", "tolerance", "fixed_sets" },
///     "regions":    { "breakpoints": [i, j, k] } }
/// Every key is optional; unknown keys are rejected. `overrides` are
/// "dotted.key=value" strings applied on top (value parsed as JSON, else
/// taken as a string). Relative input paths resolve against `base_dir`.
PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir,
                            std::span<const std::string> overrides = {}, const std::string& source = "<config>");

/// Reads the file (or starts from defaults when `path` is empty).
PipelineConfig load_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});

std::string config_to_json(const PipelineConfig& cfg);

}  // namespace aorta::io
