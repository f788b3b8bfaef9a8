#pragma once

#include <cstddef>
#include <cstdint>

#include "aortamesh/geometry.hpp"

namespace aorta::io {

/// n points distributed uniformly by area over the surface (triangle picked
/// proportionally to its area, then uniform barycentric coordinates).
/// Deterministic for a given seed. Throws Error(DegenerateSurface) when the
/// total area is zero.
PointCloud sample_surface(const TriangleSurface& surface, std::size_t n, std::uint64_t seed);

}  // namespace aorta::io
