#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "aortamesh/geometry.hpp"
#include "aortamesh/mask.hpp"

namespace aorta::io {

inline constexpr std::size_t kDefaultIsosurfaceSmoothing = 20;

/// Marching-cubes triangulation of the `iso` level set in world
/// coordinates. Triangles face away from the foreground. Crossing vertices
/// are shared between neighbouring cubes, so the result is closed whenever
/// the foreground stays clear of the volume boundary.
///
/// On a binary mask every crossing sits at an edge midpoint and the
/// staircase inflates the area by roughly 8%. `smoothing_iterations`
/// rounds of constrained smoothing remove most of that: each vertex moves
/// to its neighbours' mean projected back onto its own grid edge, clamped
/// to [0.05, 0.95] of the edge. Connectivity never changes. Pass 0 for the
/// raw triangulation.
///
/// Throws Error(NoIsosurface) for a uniform mask.
TriangleSurface mask_to_surface(const VoxelMask& mask, double iso = 0.5,
                                std::size_t smoothing_iterations = kDefaultIsosurfaceSmoothing);

/// Case table, indexed by the bitmask of foreground corners. Each entry
/// lists triangles as triples of cube-edge ids.
///
/// Corner c sits at offset (c & 1, (c >> 1) & 1, (c >> 2) & 1). Edge e joins
/// cube_edges()[e][0] < cube_edges()[e][1]. The table is generated from a
/// fixed per-face rule (foreground corners on an ambiguous face are kept
/// apart), which makes neighbouring cubes agree on every shared face.
using CaseTable = std::array<std::vector<std::array<std::uint8_t, 3>>, 256>;
const CaseTable& case_table();
const std::array<std::array<std::uint8_t, 2>, 12>& cube_edges();

/// Volume enclosed by a closed, outward-oriented triangle surface
/// (divergence theorem).
double enclosed_volume(const TriangleSurface& surface);

}  // namespace aorta::io
