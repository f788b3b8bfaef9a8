#include "aortamesh/solidify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aortamesh/error.hpp"

namespace aorta::solid {

namespace {

// Three edge neighbours of every corner, ordered so that a positively
// oriented hex has positive determinant at each corner.
constexpr std::array<std::array<int, 3>, 8> kCornerEdges{{
    {1, 3, 4},
    {2, 0, 5},
    {3, 1, 6},
    {0, 2, 7},
    {7, 5, 0},
    {4, 6, 1},
    {5, 7, 2},
    {6, 4, 3},
}};

// Outward-wound local faces.
constexpr std::array<std::array<int, 4>, 6> kHexFaces{{
    {0, 3, 2, 1},
    {4, 5, 6, 7},
    {0, 1, 5, 4},
    {1, 2, 6, 5},
    {2, 3, 7, 6},
    {3, 0, 4, 7},
}};

std::vector<Vec3> angle_weighted_normals(const tube::QuadMesh& mesh, bool allow_orphans) {
  std::vector<Vec3> acc(mesh.vertices.size());
  std::vector<bool> touched(mesh.vertices.size(), false);
  for (std::size_t q = 0; q < mesh.quads.size(); ++q) {
    const auto& f = mesh.quads[q];
    const Vec3 av = tube::quad_area_vector(mesh, q);
    const double a = norm(av);
    if (!(a > 0.0)) throw Error(ErrorKind::DegenerateElement, "quad " + std::to_string(q) + " has zero area", {q});
    const Vec3 n = av / a;
    for (int k = 0; k < 4; ++k) {
      const Vec3& p = mesh.vertices[f[k]];
      const Vec3 u = mesh.vertices[f[(k + 1) % 4]] - p;
      const Vec3 v = mesh.vertices[f[(k + 3) % 4]] - p;
      const double c = std::clamp(dot(u, v) / (norm(u) * norm(v)), -1.0, 1.0);
      acc[f[k]] += n * std::acos(c);
      touched[f[k]] = true;
    }
  }
  std::vector<std::size_t> orphans;
  for (std::size_t v = 0; v < acc.size(); ++v) {
    if (!touched[v]) {
      orphans.push_back(v);
      continue;
    }
    acc[v] = normalized(acc[v]);
  }
  if (!orphans.empty() && !allow_orphans) {
    throw Error(ErrorKind::OrphanVertex,
                std::to_string(orphans.size()) + " vertices have no incident quad (first: " +
                    std::to_string(orphans.front()) + ")",
                orphans);
  }
  return acc;
}

}  // namespace

std::vector<Vec3> vertex_normals(const tube::QuadMesh& mesh) { return angle_weighted_normals(mesh, false); }

std::array<Vec3, 8> hex_corners(const HexMesh& mesh, std::size_t e) {
  std::array<Vec3, 8> x;
  for (int a = 0; a < 8; ++a) x[a] = mesh.nodes[mesh.hexes[e][a]];
  return x;
}

std::array<double, 8> corner_scaled_jacobians(const std::array<Vec3, 8>& x) {
  std::array<double, 8> sj{};
  for (int a = 0; a < 8; ++a) {
    const Vec3 e1 = x[kCornerEdges[a][0]] - x[a];
    const Vec3 e2 = x[kCornerEdges[a][1]] - x[a];
    const Vec3 e3 = x[kCornerEdges[a][2]] - x[a];
    const double l = norm(e1) * norm(e2) * norm(e3);
    sj[a] = l > 0.0 ? dot(cross(e1, e2), e3) / l : 0.0;
  }
  return sj;
}

HexQualityReport hex_quality(const HexMesh& mesh) {
  HexQualityReport r;
  r.scaled_jacobian.resize(mesh.hexes.size());
  r.min_scaled_jacobian = mesh.hexes.empty() ? 0.0 : 1.0;
  for (std::size_t e = 0; e < mesh.hexes.size(); ++e) {
    const auto sj = corner_scaled_jacobians(hex_corners(mesh, e));
    const double m = *std::min_element(sj.begin(), sj.end());
    r.scaled_jacobian[e] = m;
    r.min_scaled_jacobian = std::min(r.min_scaled_jacobian, m);
    if (m <= 0.0) ++r.inverted_count;
  }
  return r;
}

HexMesh extrude_to_hex(const tube::QuadMesh& mesh, double thickness, std::size_t layers) {
  if (!(thickness > 0.0)) throw Error(ErrorKind::InvalidArgument, "wall thickness must be > 0");
  if (layers < 1) throw Error(ErrorKind::InvalidArgument, "layers must be >= 1");
  if (mesh.quads.empty()) throw Error(ErrorKind::EmptyInput, "surface has no quads");

  const auto normals = angle_weighted_normals(mesh, true);
  const auto used = tube::referenced_vertices(mesh);

  HexMesh hex;
  hex.layers = layers;
  hex.thickness = thickness;
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> compact(mesh.vertices.size(), kNone);
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    if (!used[v]) continue;
    compact[v] = hex.surface_vertices.size();
    hex.surface_vertices.push_back(v);
  }
  const std::size_t per_layer = hex.surface_vertices.size();

  hex.nodes.reserve(per_layer * (layers + 1));
  for (std::size_t l = 0; l <= layers; ++l) {
    const double offset = thickness * static_cast<double>(l) / static_cast<double>(layers);
    for (std::size_t v : hex.surface_vertices) hex.nodes.push_back(mesh.vertices[v] + normals[v] * offset);
  }

  hex.hexes.reserve(mesh.quads.size() * layers);
  for (const auto& q : mesh.quads) {
    for (std::size_t l = 0; l < layers; ++l) {
      Hex h;
      for (int k = 0; k < 4; ++k) {
        h[k] = l * per_layer + compact[q[k]];
        h[k + 4] = (l + 1) * per_layer + compact[q[k]];
      }
      hex.hexes.push_back(h);
    }
  }

  std::vector<std::size_t> bad;
  for (std::size_t e = 0; e < hex.hexes.size(); ++e) {
    const auto sj = corner_scaled_jacobians(hex_corners(hex, e));
    if (*std::min_element(sj.begin(), sj.end()) <= 0.0) bad.push_back(e);
  }
  if (!bad.empty()) {
    std::string list;
    for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 10); ++i) list += " " + std::to_string(bad[i]);
    throw Error(ErrorKind::SelfIntersection,
                std::to_string(bad.size()) + " hexes have non-positive corner Jacobians:" + list, bad);
  }

  auto all_layers = [&](auto&& select) {
    std::vector<std::size_t> ids;
    for (std::size_t l = 0; l <= layers; ++l) {
      for (std::size_t k = 0; k < per_layer; ++k) {
        if (select(hex.surface_vertices[k])) ids.push_back(l * per_layer + k);
      }
    }
    return ids;
  };
  const std::size_t nr = mesh.n_ring;
  const std::size_t ns = mesh.n_sections;
  hex.node_sets[kInletRing] = all_layers([&](std::size_t v) { return nr > 0 && v < nr; });
  hex.node_sets[kOutletRing] = all_layers([&](std::size_t v) { return nr > 0 && ns > 0 && v >= (ns - 1) * nr; });
  std::vector<bool> on_rim(mesh.vertices.size(), false);
  for (const auto& loop : mesh.hole_loops)
    for (auto v : loop) on_rim[v] = true;
  hex.node_sets[kHoleRims] = all_layers([&](std::size_t v) { return on_rim[v]; });

  auto& inner = hex.face_sets[kInnerSurface];
  auto& outer = hex.face_sets[kOuterSurface];
  for (std::size_t q = 0; q < mesh.quads.size(); ++q) {
    const Hex& first = hex.hexes[q * layers];
    const Hex& last = hex.hexes[q * layers + layers - 1];
    inner.push_back({first[0], first[1], first[2], first[3]});
    outer.push_back({last[4], last[5], last[6], last[7]});
  }
  return hex;
}

std::vector<Face> boundary_faces(const HexMesh& mesh) {
  struct Entry {
    std::array<std::size_t, 4> key;
    Face face;
  };
  std::vector<Entry> faces;
  faces.reserve(mesh.hexes.size() * 6);
  for (const auto& h : mesh.hexes) {
    for (const auto& lf : kHexFaces) {
      Face f{h[lf[0]], h[lf[1]], h[lf[2]], h[lf[3]]};
      auto key = f;
      std::sort(key.begin(), key.end());
      faces.push_back({key, f});
    }
  }
  std::sort(faces.begin(), faces.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
  std::vector<Face> out;
  for (std::size_t i = 0; i < faces.size();) {
    std::size_t j = i;
    while (j < faces.size() && faces[j].key == faces[i].key) ++j;
    if (j - i == 1) out.push_back(faces[i].face);
    i = j;
  }
  return out;
}

}  // namespace aorta::solid
