#pragma once

#include <cstddef>
#include <functional>

#include "aortamesh/geometry.hpp"
#include "aortamesh/mask.hpp"
#include "aortamesh/tube_template.hpp"

namespace aorta::synth {

// Analytic fixtures for tests, benchmarks and the bundled demo case. All
// tubes run along +z from z = 0 to z = length with the axis at x = y = 0.

using RadiusProfile = std::function<double(double z)>;

RadiusProfile constant_radius(double r);
/// base + amplitude * exp(-(z - center)^2 / (2 sigma^2)).
RadiusProfile gaussian_bulge(double base, double amplitude, double center, double sigma);

/// Structured quad tube with exact circular sections (frames T = z, N = x, B = y).
tube::QuadMesh tube_quads(const RadiusProfile& radius, double length, std::size_t n_sections, std::size_t n_ring);

/// Open triangulated tube surface (no end caps), outward facing.
TriangleSurface tube_surface(const RadiusProfile& radius, double length, std::size_t n_axial, std::size_t n_around);

/// Hinge points on the z = 0 circle, end curve on the z = length circle,
/// `n_centerline` axis points; radii included on request.
LandmarkSet tube_landmarks(const RadiusProfile& radius, double length, std::size_t n_centerline, bool with_radii);

/// Closed curve of `n` points lying on the tube wall around the point at
/// height z and azimuth phi (radians), with the given curve radius.
std::vector<Vec3> wall_curve(const RadiusProfile& radius, double z, double phi, double curve_radius, std::size_t n);

/// Ball of `radius` digitized on a grid of `spacing` with a 3-voxel margin.
io::VoxelMask sphere_mask(double radius, double spacing);
/// Solid cylinder along z (radius, height) with a 3-voxel margin.
io::VoxelMask cylinder_mask(double radius, double height, double spacing);

}  // namespace aorta::synth
