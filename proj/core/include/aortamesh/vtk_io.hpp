#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aortamesh/fea.hpp"
#include "aortamesh/solidify.hpp"
#include "aortamesh/tube_template.hpp"

namespace aorta::io {

// Legacy ASCII VTK. Coordinates and values are printed with 17 significant
// digits so a write/read cycle reproduces every double bit for bit.
// Mesh metadata (grid size, holes, node/face sets, the spine used for
// region labelling) travels as dataset FIELD arrays.

struct QuadDocument {
  tube::QuadMesh mesh;
  std::vector<Vec3> centerline;  // optional
};

/// POLYDATA with one 4-gon per quad.
std::string quad_vtk_text(const QuadDocument& doc);
void write_quad_vtk(const std::filesystem::path& path, const QuadDocument& doc);
QuadDocument parse_quad_vtk(const std::string& text, const std::string& source = "<vtk>");
QuadDocument read_quad_vtk(const std::filesystem::path& path);

/// Optional per-element / per-node results; empty vectors are not written.
struct HexFields {
  std::vector<double> max_abs_principal;         // kPa, CELL_DATA "max_abs_principal_stress_kPa"
  std::vector<fea::StressTensor> stress;         // kPa, CELL_DATA "stress_kPa"
  std::vector<double> scaled_jacobian;           // CELL_DATA "min_scaled_jacobian"
  std::vector<Vec3> displacement;                // mm, POINT_DATA "displacement_mm"
};

struct HexDocument {
  solid::HexMesh mesh;
  std::vector<Vec3> centerline;  // optional
  HexFields fields;
};

/// UNSTRUCTURED_GRID of VTK_HEXAHEDRON (type 12) cells in HexMesh corner order.
std::string hex_vtk_text(const HexDocument& doc);
void write_hex_vtk(const std::filesystem::path& path, const HexDocument& doc);
HexDocument parse_hex_vtk(const std::string& text, const std::string& source = "<vtk>");
HexDocument read_hex_vtk(const std::filesystem::path& path);

}  // namespace aorta::io
