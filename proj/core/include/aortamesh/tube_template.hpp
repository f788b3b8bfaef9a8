#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "aortamesh/geometry.hpp"
#include "aortamesh/spatial_index.hpp"

namespace aorta::tube {

/// One ring of the tube: n_ring points on the circle of `radius` around
/// `center`, in the plane spanned by the frame's N and B.
struct CrossSection {
  Vec3 center;
  double radius = 0.0;
  Frame frame;
  std::vector<Vec3> ring;
};

/// Grid coordinate of a quad: quad between sections j and j+1 starting at
/// ring index i.
struct GridCoord {
  std::size_t section = 0;
  std::size_t ring = 0;
  friend bool operator==(const GridCoord&, const GridCoord&) = default;
  friend auto operator<=>(const GridCoord&, const GridCoord&) = default;
};

using Quad = std::array<std::size_t, 4>;

/// Structured ring-by-ring quad surface. Vertex id = section * n_ring + ring.
/// Quads are wound counter-clockwise seen from outside (normal away from
/// the centerline). Cutting holes removes quads but keeps every vertex, so
/// vertex ids stay in correspondence across patients.
struct QuadMesh {
  std::vector<Vec3> vertices;
  std::vector<Quad> quads;
  std::size_t n_sections = 0;
  std::size_t n_ring = 0;
  std::vector<std::vector<std::size_t>> hole_loops;
  std::vector<GridCoord> removed_quads;
};

struct TemplateConfig {
  std::size_t n_sections = 320;
  std::size_t n_ring = 78;
  double max_plane_distance = 5.0;  // mm
};

CrossSection cross_section(const Vec3& center, double radius, const Frame& frame, std::size_t n_ring);

QuadMesh build_tube(std::span<const CrossSection> sections);

/// Grid connectivity for the given dimensions minus `removed` quads (which
/// must be sorted). Pure function of its arguments.
std::vector<Quad> grid_quads(std::size_t n_sections, std::size_t n_ring, std::span<const GridCoord> removed = {});

/// Removes quads whose centroid lies within `max_plane_distance` of each
/// curve's best-fit plane and projects inside the curve polygon.
QuadMesh cut_branch_holes(const QuadMesh& mesh, std::span<const std::vector<Vec3>> arch_curves,
                          double max_plane_distance);

/// Full template: endpoints snapped to the hinge centroid and end-curve
/// centroid, resampled, radii from landmarks or the target surface, end
/// sections aligned with the hinge and end-curve planes, holes cut.
QuadMesh build_template(const LandmarkSet& landmarks, const KdTree& target_index, const TemplateConfig& cfg);

/// The resampled, endpoint-snapped centerline used by build_template.
Centerline template_centerline(const LandmarkSet& landmarks, const KdTree& target_index, const TemplateConfig& cfg);

Vec3 quad_centroid(const QuadMesh& mesh, std::size_t q);
/// Unnormalized area vector 0.5 * (p2 - p0) x (p3 - p1).
Vec3 quad_area_vector(const QuadMesh& mesh, std::size_t q);

/// Per-vertex flag: referenced by at least one quad.
std::vector<bool> referenced_vertices(const QuadMesh& mesh);

/// Undirected edges with their incident quad count.
struct EdgeUse {
  std::size_t a = 0;
  std::size_t b = 0;
  int count = 0;
};
std::vector<EdgeUse> edge_uses(std::span<const Quad> quads);

/// Quads whose corner normals point toward the centerline (or flip against
/// each other), i.e. folded or inverted elements.
std::vector<std::size_t> inverted_quads(const QuadMesh& mesh, std::span<const Vec3> centerline);

}  // namespace aorta::tube
