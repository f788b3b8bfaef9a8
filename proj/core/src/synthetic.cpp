#include "aortamesh/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "aortamesh/error.hpp"

namespace aorta::synth {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec3 on_wall(const RadiusProfile& radius, double z, double phi) {
  const double r = radius(z);
  return {r * std::cos(phi), r * std::sin(phi), z};
}

io::VoxelMask make_mask(const Vec3& extent, double spacing) {
  if (!(spacing > 0.0)) throw Error(ErrorKind::InvalidArgument, "voxel spacing must be positive");
  io::VoxelMask m;
  for (int a = 0; a < 3; ++a) m.dims[a] = static_cast<std::size_t>(std::ceil(extent[a] / spacing)) + 7;
  m.spacing = {spacing, spacing, spacing};
  m.values.assign(m.dims[0] * m.dims[1] * m.dims[2], 0);
  return m;
}

}  // namespace

RadiusProfile constant_radius(double r) {
  return [r](double) { return r; };
}

RadiusProfile gaussian_bulge(double base, double amplitude, double center, double sigma) {
  return [=](double z) { return base + amplitude * std::exp(-(z - center) * (z - center) / (2.0 * sigma * sigma)); };
}

tube::QuadMesh tube_quads(const RadiusProfile& radius, double length, std::size_t n_sections, std::size_t n_ring) {
  if (n_sections < 2) throw Error(ErrorKind::InvalidArgument, "a tube needs at least 2 sections");
  const Frame frame{{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
  std::vector<tube::CrossSection> sections;
  sections.reserve(n_sections);
  for (std::size_t j = 0; j < n_sections; ++j) {
    const double z = length * static_cast<double>(j) / static_cast<double>(n_sections - 1);
    sections.push_back(tube::cross_section({0, 0, z}, radius(z), frame, n_ring));
  }
  return tube::build_tube(sections);
}

TriangleSurface tube_surface(const RadiusProfile& radius, double length, std::size_t n_axial, std::size_t n_around) {
  const auto quads = tube_quads(radius, length, n_axial, n_around);
  TriangleSurface s;
  s.vertices = quads.vertices;
  for (const auto& q : quads.quads) {
    s.triangles.push_back({q[0], q[1], q[2]});
    s.triangles.push_back({q[0], q[2], q[3]});
  }
  return s;
}

LandmarkSet tube_landmarks(const RadiusProfile& radius, double length, std::size_t n_centerline, bool with_radii) {
  if (n_centerline < 2) throw Error(ErrorKind::InvalidArgument, "centerline needs at least 2 points");
  LandmarkSet lm;
  for (int k = 0; k < 3; ++k) lm.hinge_points[k] = on_wall(radius, 0.0, kTwoPi * k / 3.0 + 0.3);
  for (int k = 0; k < 24; ++k) lm.end_curve.push_back(on_wall(radius, length, kTwoPi * k / 24.0));
  std::vector<double> radii;
  for (std::size_t j = 0; j < n_centerline; ++j) {
    const double z = length * static_cast<double>(j) / static_cast<double>(n_centerline - 1);
    lm.centerline_points.push_back({0, 0, z});
    radii.push_back(radius(z));
  }
  if (with_radii) lm.centerline_radii = std::move(radii);
  return lm;
}

std::vector<Vec3> wall_curve(const RadiusProfile& radius, double z, double phi, double curve_radius, std::size_t n) {
  std::vector<Vec3> curve;
  const double r = radius(z);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    const double dz = curve_radius * std::sin(t);
    const double dphi = curve_radius * std::cos(t) / r;
    curve.push_back(on_wall(radius, z + dz, phi + dphi));
  }
  return curve;
}

io::VoxelMask sphere_mask(double radius, double spacing) {
  auto m = make_mask({2 * radius, 2 * radius, 2 * radius}, spacing);
  const Vec3 c = m.position(0.5 * double(m.dims[0] - 1), 0.5 * double(m.dims[1] - 1), 0.5 * double(m.dims[2] - 1));
  for (std::size_t k = 0; k < m.dims[2]; ++k)
    for (std::size_t j = 0; j < m.dims[1]; ++j)
      for (std::size_t i = 0; i < m.dims[0]; ++i)
        if (distance2(m.position(double(i), double(j), double(k)), c) <= radius * radius) m.values[m.index(i, j, k)] = 1;
  return m;
}

io::VoxelMask cylinder_mask(double radius, double height, double spacing) {
  auto m = make_mask({2 * radius, 2 * radius, height}, spacing);
  const Vec3 c = m.position(0.5 * double(m.dims[0] - 1), 0.5 * double(m.dims[1] - 1), 0.5 * double(m.dims[2] - 1));
  for (std::size_t k = 0; k < m.dims[2]; ++k)
    for (std::size_t j = 0; j < m.dims[1]; ++j)
      for (std::size_t i = 0; i < m.dims[0]; ++i) {
        const Vec3 d = m.position(double(i), double(j), double(k)) - c;
        if (d.x * d.x + d.y * d.y <= radius * radius && std::abs(d.z) <= 0.5 * height) m.values[m.index(i, j, k)] = 1;
      }
  return m;
}

}  // namespace aorta::synth
