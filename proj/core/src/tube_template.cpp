#include "aortamesh/tube_template.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "aortamesh/error.hpp"

namespace aorta::tube {

namespace {

struct PlaneBasis {
  Plane plane;
  Vec3 u;
  Vec3 v;
};

PlaneBasis plane_basis(std::span<const Vec3> curve) {
  const Plane plane = fit_plane(curve);
  const Vec3& n = plane.normal;
  const Vec3 seed = std::abs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 u = normalized(seed - n * dot(seed, n));
  return {plane, u, cross(n, u)};
}

struct Point2 {
  double x;
  double y;
};

// Even-odd crossing test.
bool inside_polygon(const std::vector<Point2>& poly, Point2 p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = poly[i];
    const Point2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

// Boundary of a set of quads as a single directed cycle; throws if the
// boundary is not exactly one simple loop.
std::vector<std::size_t> single_boundary_loop(std::span<const Quad> quads, std::size_t curve_id) {
  std::map<std::pair<std::size_t, std::size_t>, int> directed;
  for (const auto& q : quads) {
    for (int k = 0; k < 4; ++k) directed[{q[k], q[(k + 1) % 4]}] += 1;
  }
  std::map<std::size_t, std::vector<std::size_t>> next;
  std::size_t edge_count = 0;
  for (const auto& [edge, count] : directed) {
    if (directed.count({edge.second, edge.first}) == 0) {
      next[edge.first].push_back(edge.second);
      ++edge_count;
    }
  }
  const std::string tag = "hole for arch curve " + std::to_string(curve_id);
  for (const auto& [v, outs] : next) {
    if (outs.size() != 1) throw Error(ErrorKind::NonSimpleHole, tag + " pinches at vertex " + std::to_string(v), {curve_id});
  }
  if (next.empty()) throw Error(ErrorKind::NonSimpleHole, tag + " has no boundary", {curve_id});

  std::vector<std::size_t> loop;
  const std::size_t start = next.begin()->first;
  std::size_t cur = start;
  do {
    loop.push_back(cur);
    auto it = next.find(cur);
    if (it == next.end()) throw Error(ErrorKind::NonSimpleHole, tag + " boundary is open", {curve_id});
    cur = it->second.front();
  } while (cur != start && loop.size() <= edge_count);
  if (cur != start || loop.size() != edge_count) {
    throw Error(ErrorKind::NonSimpleHole, tag + " boundary splits into several loops", {curve_id});
  }
  return loop;
}

}  // namespace

CrossSection cross_section(const Vec3& center, double radius, const Frame& frame, std::size_t n_ring) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorKind::InvalidRadius, "cross-section radius must be positive, got " + std::to_string(radius));
  }
  if (n_ring < 3) throw Error(ErrorKind::InvalidArgument, "n_ring must be >= 3");
  CrossSection s{center, radius, frame, {}};
  s.ring.resize(n_ring);
  for (std::size_t k = 0; k < n_ring; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_ring);
    s.ring[k] = center + frame.N * (radius * std::cos(theta)) + frame.B * (radius * std::sin(theta));
  }
  return s;
}

std::vector<Quad> grid_quads(std::size_t n_sections, std::size_t n_ring, std::span<const GridCoord> removed) {
  std::vector<Quad> quads;
  if (n_sections < 2) return quads;
  quads.reserve((n_sections - 1) * n_ring - std::min(removed.size(), (n_sections - 1) * n_ring));
  for (std::size_t j = 0; j + 1 < n_sections; ++j) {
    for (std::size_t i = 0; i < n_ring; ++i) {
      if (!removed.empty() && std::binary_search(removed.begin(), removed.end(), GridCoord{j, i})) continue;
      const std::size_t i1 = (i + 1) % n_ring;
      quads.push_back({j * n_ring + i, j * n_ring + i1, (j + 1) * n_ring + i1, (j + 1) * n_ring + i});
    }
  }
  return quads;
}

QuadMesh build_tube(std::span<const CrossSection> sections) {
  if (sections.size() < 2) throw Error(ErrorKind::InvalidArgument, "a tube needs at least 2 cross-sections");
  const std::size_t n_ring = sections.front().ring.size();
  for (std::size_t j = 0; j < sections.size(); ++j) {
    if (sections[j].ring.size() != n_ring) {
      throw Error(ErrorKind::InconsistentSections,
                  "section " + std::to_string(j) + " has " + std::to_string(sections[j].ring.size()) +
                      " ring points, expected " + std::to_string(n_ring),
                  {j});
    }
  }
  QuadMesh mesh;
  mesh.n_sections = sections.size();
  mesh.n_ring = n_ring;
  mesh.vertices.reserve(mesh.n_sections * n_ring);
  for (const auto& s : sections) mesh.vertices.insert(mesh.vertices.end(), s.ring.begin(), s.ring.end());
  mesh.quads = grid_quads(mesh.n_sections, n_ring);
  return mesh;
}

QuadMesh cut_branch_holes(const QuadMesh& mesh, std::span<const std::vector<Vec3>> arch_curves,
                          double max_plane_distance) {
  if (arch_curves.empty()) return mesh;
  if (!mesh.removed_quads.empty() || !mesh.hole_loops.empty()) {
    throw Error(ErrorKind::InvalidArgument, "cut_branch_holes expects a hole-free mesh");
  }
  const std::size_t ns = mesh.n_sections;
  const std::size_t nr = mesh.n_ring;
  if (mesh.quads.size() != (ns - 1) * nr) {
    throw Error(ErrorKind::InvalidArgument, "mesh is not a full structured tube");
  }

  std::vector<GridCoord> removed;
  std::vector<std::vector<std::size_t>> loops;
  for (std::size_t c = 0; c < arch_curves.size(); ++c) {
    const auto& curve = arch_curves[c];
    if (curve.size() < 3) {
      throw Error(ErrorKind::InvalidArgument, "arch curve " + std::to_string(c) + " needs at least 3 points", {c});
    }
    const PlaneBasis basis = plane_basis(curve);
    std::vector<Point2> poly;
    poly.reserve(curve.size());
    for (const auto& p : curve) {
      const Vec3 d = p - basis.plane.origin;
      poly.push_back({dot(d, basis.u), dot(d, basis.v)});
    }

    std::vector<GridCoord> hit;
    std::vector<Quad> hit_quads;
    for (std::size_t j = 0; j + 1 < ns; ++j) {
      for (std::size_t i = 0; i < nr; ++i) {
        const std::size_t q = j * nr + i;
        const Vec3 ctr = quad_centroid(mesh, q);
        if (std::abs(basis.plane.signed_distance(ctr)) > max_plane_distance) continue;
        const Vec3 d = ctr - basis.plane.origin;
        if (!inside_polygon(poly, {dot(d, basis.u), dot(d, basis.v)})) continue;
        hit.push_back({j, i});
        hit_quads.push_back(mesh.quads[q]);
      }
    }
    if (hit.empty()) {
      throw Error(ErrorKind::CurveMissesMesh, "arch curve " + std::to_string(c) + " does not intersect the mesh", {c});
    }
    for (const auto& g : hit) {
      if (g.section == 0 || g.section + 2 == ns) {
        throw Error(ErrorKind::NonSimpleHole,
                    "hole for arch curve " + std::to_string(c) + " reaches the tube end", {c});
      }
      if (std::find(removed.begin(), removed.end(), g) != removed.end()) {
        throw Error(ErrorKind::NonSimpleHole, "hole for arch curve " + std::to_string(c) + " overlaps another hole",
                    {c});
      }
    }
    loops.push_back(single_boundary_loop(hit_quads, c));
    removed.insert(removed.end(), hit.begin(), hit.end());
  }

  QuadMesh out = mesh;
  std::sort(removed.begin(), removed.end());
  out.removed_quads = removed;
  out.quads = grid_quads(ns, nr, removed);
  out.hole_loops = std::move(loops);
  return out;
}

Centerline template_centerline(const LandmarkSet& landmarks, const KdTree& target_index, const TemplateConfig& cfg) {
  validate(landmarks);
  if (cfg.n_sections < 2) throw Error(ErrorKind::InvalidArgument, "n_sections must be >= 2");
  std::vector<Vec3> pts = landmarks.centerline_points;
  pts.front() = centroid(landmarks.hinge_points);
  pts.back() = centroid(landmarks.end_curve);

  if (landmarks.centerline_radii) {
    return resample_centerline(Centerline{pts, *landmarks.centerline_radii}, cfg.n_sections);
  }
  Centerline cl;
  cl.points = resample_polyline(pts, cfg.n_sections);
  cl.radii = compute_radii(cl.points, target_index);
  for (std::size_t i = 0; i < cl.radii.size(); ++i) {
    if (!(cl.radii[i] > 0.0)) {
      throw Error(ErrorKind::InvalidRadius, "centerline point " + std::to_string(i) + " lies on the surface", {i});
    }
  }
  return cl;
}

QuadMesh build_template(const LandmarkSet& landmarks, const KdTree& target_index, const TemplateConfig& cfg) {
  const Centerline cl = template_centerline(landmarks, target_index, cfg);
  const std::size_t n = cl.points.size();

  const auto& h = landmarks.hinge_points;
  Vec3 start_normal = normalized(cross(h[1] - h[0], h[2] - h[0]));
  if (dot(start_normal, cl.points[1] - cl.points[0]) < 0.0) start_normal = -start_normal;
  Vec3 end_normal = fit_plane(landmarks.end_curve).normal;
  if (dot(end_normal, cl.points[n - 1] - cl.points[n - 2]) < 0.0) end_normal = -end_normal;

  const auto frames = transport_frames(cl.points, FrameOptions{start_normal, end_normal});
  std::vector<CrossSection> sections;
  sections.reserve(n);
  for (std::size_t j = 0; j < n; ++j) sections.push_back(cross_section(cl.points[j], cl.radii[j], frames[j], cfg.n_ring));
  const QuadMesh tube = build_tube(sections);
  return cut_branch_holes(tube, landmarks.arch_curves, cfg.max_plane_distance);
}

Vec3 quad_centroid(const QuadMesh& mesh, std::size_t q) {
  const Quad& f = mesh.quads[q];
  return (mesh.vertices[f[0]] + mesh.vertices[f[1]] + mesh.vertices[f[2]] + mesh.vertices[f[3]]) * 0.25;
}

Vec3 quad_area_vector(const QuadMesh& mesh, std::size_t q) {
  const Quad& f = mesh.quads[q];
  return cross(mesh.vertices[f[2]] - mesh.vertices[f[0]], mesh.vertices[f[3]] - mesh.vertices[f[1]]) * 0.5;
}

std::vector<bool> referenced_vertices(const QuadMesh& mesh) {
  std::vector<bool> used(mesh.vertices.size(), false);
  for (const auto& q : mesh.quads)
    for (auto v : q) used[v] = true;
  return used;
}

std::vector<EdgeUse> edge_uses(std::span<const Quad> quads) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  edges.reserve(quads.size() * 4);
  for (const auto& q : quads) {
    for (int k = 0; k < 4; ++k) {
      const std::size_t a = q[k];
      const std::size_t b = q[(k + 1) % 4];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  std::vector<EdgeUse> out;
  for (const auto& e : edges) {
    if (!out.empty() && out.back().a == e.first && out.back().b == e.second) {
      ++out.back().count;
    } else {
      out.push_back({e.first, e.second, 1});
    }
  }
  return out;
}

std::vector<std::size_t> inverted_quads(const QuadMesh& mesh, std::span<const Vec3> centerline) {
  if (centerline.empty()) throw Error(ErrorKind::EmptyInput, "centerline is empty");
  const KdTree axis(std::vector<Vec3>(centerline.begin(), centerline.end()));
  std::vector<std::size_t> bad;
  for (std::size_t q = 0; q < mesh.quads.size(); ++q) {
    const Quad& f = mesh.quads[q];
    const Vec3 c = quad_centroid(mesh, q);
    const Vec3 outward = c - centerline[axis.nearest(c).index];
    for (int k = 0; k < 4; ++k) {
      const Vec3& p = mesh.vertices[f[k]];
      const Vec3 n = cross(mesh.vertices[f[(k + 1) % 4]] - p, mesh.vertices[f[(k + 3) % 4]] - p);
      if (dot(n, outward) <= 0.0) {
        bad.push_back(q);
        break;
      }
    }
  }
  return bad;
}

}  // namespace aorta::tube
