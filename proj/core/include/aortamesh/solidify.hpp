#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "aortamesh/tube_template.hpp"

namespace aorta::solid {

/// Corner order: inner quad (0..3) then outer quad (4..7), both wound like
/// the surface quad. Matches the VTK_HEXAHEDRON (cell type 12) convention.
using Hex = std::array<std::size_t, 8>;
/// Boundary quad; its winding normal points away from the lumen.
using Face = std::array<std::size_t, 4>;

inline constexpr const char* kInletRing = "inlet_ring";
inline constexpr const char* kOutletRing = "outlet_ring";
inline constexpr const char* kHoleRims = "hole_rims";
inline constexpr const char* kInnerSurface = "inner_surface";
inline constexpr const char* kOuterSurface = "outer_surface";

struct HexMesh {
  std::vector<Vec3> nodes;
  std::vector<Hex> hexes;
  std::map<std::string, std::vector<std::size_t>> node_sets;
  std::map<std::string, std::vector<Face>> face_sets;
  std::size_t layers = 0;
  double thickness = 0.0;
  // Layer-0 node k sits on surface vertex surface_vertices[k]; node
  // l * surface_vertices.size() + k is its copy in layer l.
  std::vector<std::size_t> surface_vertices;
};

struct HexQualityReport {
  double min_scaled_jacobian = 0.0;
  std::size_t inverted_count = 0;
  std::vector<double> scaled_jacobian;
};

/// Unit angle-weighted vertex normals. Throws Error(OrphanVertex) if any
/// vertex has no incident quad.
std::vector<Vec3> vertex_normals(const tube::QuadMesh& mesh);

/// Offsets the surface outward in `layers` equal steps to a wall of
/// `thickness`. Vertices left unreferenced by hole cutting are skipped.
HexMesh extrude_to_hex(const tube::QuadMesh& mesh, double thickness, std::size_t layers);

/// Corner scaled Jacobians: det[e1 e2 e3] / (|e1| |e2| |e3|) with the three
/// edges leaving the corner in right-handed order.
std::array<double, 8> corner_scaled_jacobians(const std::array<Vec3, 8>& x);

HexQualityReport hex_quality(const HexMesh& mesh);

/// Faces that belong to exactly one hex, with outward (from the solid) winding.
std::vector<Face> boundary_faces(const HexMesh& mesh);

std::array<Vec3, 8> hex_corners(const HexMesh& mesh, std::size_t e);

}  // namespace aorta::solid
