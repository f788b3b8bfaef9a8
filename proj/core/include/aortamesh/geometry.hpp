#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aortamesh/vec3.hpp"

namespace aorta {

class KdTree;

using PointCloud = std::vector<Vec3>;

/// Ordered spine of the vessel with the inscribed-sphere radius per point.
struct Centerline {
  std::vector<Vec3> points;
  std::vector<double> radii;
};

/// Annotated patient landmarks. Radii and region breakpoints are optional;
/// missing radii are derived from the target surface.
struct LandmarkSet {
  std::array<Vec3, 3> hinge_points;
  std::vector<Vec3> end_curve;
  std::vector<std::vector<Vec3>> arch_curves;
  std::vector<Vec3> centerline_points;
  std::optional<std::vector<double>> centerline_radii;
  std::optional<std::array<std::size_t, 3>> region_breakpoints;
};

/// Throws Error(InvalidArgument) if any LandmarkSet invariant is violated.
void validate(const LandmarkSet& landmarks);

struct TriangleSurface {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::size_t, 3>> triangles;
};

/// Throws on out-of-range indices or triangles with area below 1e-12 mm^2.
void validate(const TriangleSurface& surface);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
double surface_area(const TriangleSurface& surface);

double polyline_length(std::span<const Vec3> poly);

/// n points spaced uniformly by arc length along the piecewise-linear
/// interpolant of `poly`. Endpoints are copied exactly.
std::vector<Vec3> resample_polyline(std::span<const Vec3> poly, std::size_t n);

/// Resamples points as above and interpolates radii linearly in arc length.
Centerline resample_centerline(const Centerline& centerline, std::size_t n);

struct FrameOptions {
  // Override the tangent at the first / last point (e.g. to align the end
  // sections with an annotated plane).
  std::optional<Vec3> start_tangent;
  std::optional<Vec3> end_tangent;
};

/// Rotation-minimizing frames along `points`, one per point.
std::vector<Frame> transport_frames(std::span<const Vec3> points, const FrameOptions& options = {});
std::vector<Frame> transport_frames(const Centerline& centerline, const FrameOptions& options = {});

/// Distance from each point to its nearest indexed surface sample.
std::vector<double> compute_radii(std::span<const Vec3> points, const KdTree& surface_index);

struct Plane {
  Vec3 origin;  // centroid of the fitted points
  Vec3 normal;  // unit
  double signed_distance(const Vec3& p) const { return dot(p - origin, normal); }
};

/// Least-squares plane through the points (normal = smallest principal axis).
Plane fit_plane(std::span<const Vec3> points);

Vec3 centroid(std::span<const Vec3> points);

/// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending; `vectors[k]` is the unit eigenvector for values[k].
struct SymEigen3 {
  std::array<double, 3> values;
  std::array<Vec3, 3> vectors;
};
SymEigen3 eigen_symmetric(const Mat3& m);

/// Closed-form (trigonometric) eigenvalues of a symmetric 3x3 matrix, ascending.
std::array<double, 3> eigenvalues_symmetric(const Mat3& m);

/// Rigid transform helper used by tests and synthetic fixtures.
Vec3 rotate(const Mat3& r, const Vec3& v);

}  // namespace aorta
