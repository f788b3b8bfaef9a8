#include "aortamesh/marching_cubes.hpp"

#include <algorithm>
#include <unordered_map>

#include "aortamesh/error.hpp"

namespace aorta::io {

namespace {

Vec3 corner_offset(int c) { return {double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}; }

std::array<std::array<std::uint8_t, 2>, 12> make_edges() {
  std::array<std::array<std::uint8_t, 2>, 12> edges{};
  std::size_t n = 0;
  for (int a = 0; a < 8; ++a) {
    for (int bit = 0; bit < 3; ++bit) {
      const int b = a | (1 << bit);
      if (b != a) edges[n++] = {std::uint8_t(a), std::uint8_t(b)};
    }
  }
  return edges;
}

int edge_id(int a, int b) {
  const auto& edges = cube_edges();
  if (a > b) std::swap(a, b);
  for (int e = 0; e < 12; ++e)
    if (edges[e][0] == a && edges[e][1] == b) return e;
  return -1;
}

// True when three cube edges all lie on one face of the cube.
bool in_one_face(int e0, int e1, int e2) {
  const auto& edges = cube_edges();
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      bool all = true;
      for (int e : {e0, e1, e2}) {
        const int a = edges[e][0];
        const int b = edges[e][1];
        all = all && ((a >> axis) & 1) == side && ((b >> axis) & 1) == side;
      }
      if (all) return true;
    }
  }
  return false;
}

CaseTable make_table() {
  const auto& edges = cube_edges();
  CaseTable table;
  for (int cs = 0; cs < 256; ++cs) {
    const auto inside = [cs](int c) { return ((cs >> c) & 1) != 0; };
    std::array<int, 12> next;
    next.fill(-1);
    for (int axis = 0; axis < 3; ++axis) {
      const int u = axis == 0 ? 1 : 0;
      const int v = axis == 2 ? 1 : 2;
      for (int side = 0; side < 2; ++side) {
        Vec3 normal;
        normal[axis] = side ? 1.0 : -1.0;
        const int base = side << axis;
        const std::array<int, 4> ring{base, base | (1 << u), base | (1 << u) | (1 << v), base | (1 << v)};
        int n_in = 0;
        for (int c : ring) n_in += inside(c);
        if (n_in == 0 || n_in == 4) continue;

        // Segments as (edge, edge, direction from foreground to background).
        struct Seg {
          int e0, e1;
          Vec3 w;
        };
        std::vector<Seg> segs;
        const auto ring_edge = [&](int k) { return edge_id(ring[k], ring[(k + 1) % 4]); };
        const bool ambiguous = n_in == 2 && inside(ring[0]) == inside(ring[2]);
        if (ambiguous) {
          Vec3 center;
          for (int c : ring) center += corner_offset(c) * 0.25;
          for (int k = 0; k < 4; ++k) {
            if (!inside(ring[k])) continue;
            segs.push_back({ring_edge((k + 3) % 4), ring_edge(k), center - corner_offset(ring[k])});
          }
        } else {
          std::vector<int> crossing;
          Vec3 in_c;
          Vec3 out_c;
          for (int k = 0; k < 4; ++k) {
            if (inside(ring[k]) != inside(ring[(k + 1) % 4])) crossing.push_back(ring_edge(k));
            (inside(ring[k]) ? in_c : out_c) += corner_offset(ring[k]);
          }
          segs.push_back({crossing[0], crossing[1], out_c / double(4 - n_in) - in_c / double(n_in)});
        }
        for (auto& s : segs) {
          const auto mid = [&](int e) { return (corner_offset(edges[e][0]) + corner_offset(edges[e][1])) * 0.5; };
          const Vec3 d = mid(s.e1) - mid(s.e0);
          if (dot(cross(d, s.w), normal) < 0.0) std::swap(s.e0, s.e1);
          next[s.e0] = s.e1;
        }
      }
    }
    // Each crossing edge has exactly one successor; chain into loops and fan.
    std::array<bool, 12> used{};
    for (int start = 0; start < 12; ++start) {
      if (next[start] < 0 || used[start]) continue;
      std::vector<int> loop;
      for (int e = start; !used[e]; e = next[e]) {
        used[e] = true;
        loop.push_back(e);
      }
      // Fan from the apex that keeps every triangle off the cube faces; a
      // triangle lying in a face would be mirrored by the neighbouring cube.
      const std::size_t m = loop.size();
      std::size_t apex = 0;
      std::size_t best = m;
      for (std::size_t s = 0; s < m && best > 0; ++s) {
        std::size_t flat = 0;
        for (std::size_t k = 1; k + 1 < m; ++k) {
          flat += in_one_face(loop[s], loop[(s + k) % m], loop[(s + k + 1) % m]);
        }
        if (flat < best) {
          best = flat;
          apex = s;
        }
      }
      for (std::size_t k = 1; k + 1 < m; ++k) {
        table[cs].push_back({std::uint8_t(loop[apex]), std::uint8_t(loop[(apex + k) % m]),
                             std::uint8_t(loop[(apex + k + 1) % m])});
      }
    }
  }
  return table;
}

}  // namespace

const std::array<std::array<std::uint8_t, 2>, 12>& cube_edges() {
  static const auto edges = make_edges();
  return edges;
}

const CaseTable& case_table() {
  static const CaseTable table = make_table();
  return table;
}

TriangleSurface mask_to_surface(const VoxelMask& mask, double iso, std::size_t smoothing_iterations) {
  validate(mask);
  const auto [nx, ny, nz] = mask.dims;
  bool any_in = false;
  bool any_out = false;
  for (auto v : mask.values) (double(v) > iso ? any_in : any_out) = true;
  if (!any_in || !any_out) throw Error(ErrorKind::NoIsosurface, "mask is uniform; no isosurface at level " + std::to_string(iso));

  const auto& table = case_table();
  const auto& edges = cube_edges();
  TriangleSurface out;
  std::unordered_map<std::size_t, std::size_t> vertex_of_edge;
  std::vector<Vec3> edge_start;
  std::vector<Vec3> edge_span;

  const auto grid_index = [&](std::size_t i, std::size_t j, std::size_t k) { return i + nx * (j + ny * k); };
  for (std::size_t k = 0; k + 1 < nz; ++k) {
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      for (std::size_t i = 0; i + 1 < nx; ++i) {
        std::array<double, 8> val;
        int cs = 0;
        for (int c = 0; c < 8; ++c) {
          val[c] = mask.at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          if (val[c] > iso) cs |= 1 << c;
        }
        if (table[cs].empty()) continue;
        std::array<std::size_t, 12> vid;
        vid.fill(0);
        std::array<bool, 12> have{};
        const auto vertex = [&](int e) {
          if (have[e]) return vid[e];
          const int a = edges[e][0];
          const int b = edges[e][1];
          const int axis = (a ^ b) == 1 ? 0 : ((a ^ b) == 2 ? 1 : 2);
          const std::size_t gi = i + (a & 1);
          const std::size_t gj = j + ((a >> 1) & 1);
          const std::size_t gk = k + ((a >> 2) & 1);
          const std::size_t key = grid_index(gi, gj, gk) * 3 + std::size_t(axis);
          auto [it, inserted] = vertex_of_edge.try_emplace(key, out.vertices.size());
          if (inserted) {
            const double t = (iso - val[a]) / (val[b] - val[a]);
            double p[3] = {double(gi), double(gj), double(gk)};
            p[axis] += t;
            out.vertices.push_back(mask.position(p[0], p[1], p[2]));
            double q[3] = {double(gi), double(gj), double(gk)};
            q[axis] += 1.0;
            edge_start.push_back(mask.position(gi, gj, gk));
            edge_span.push_back(mask.position(q[0], q[1], q[2]) - edge_start.back());
          }
          have[e] = true;
          vid[e] = it->second;
          return it->second;
        };
        for (const auto& tri : table[cs]) out.triangles.push_back({vertex(tri[0]), vertex(tri[1]), vertex(tri[2])});
      }
    }
  }
  if (smoothing_iterations == 0) return out;

  const std::size_t nv = out.vertices.size();
  std::vector<std::vector<std::size_t>> adjacent(nv);
  for (const auto& t : out.triangles) {
    for (int a = 0; a < 3; ++a) {
      adjacent[t[a]].push_back(t[(a + 1) % 3]);
      adjacent[t[a]].push_back(t[(a + 2) % 3]);
    }
  }
  for (auto& a : adjacent) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  std::vector<Vec3> moved(nv);
  for (std::size_t it = 0; it < smoothing_iterations; ++it) {
    for (std::size_t v = 0; v < nv; ++v) {
      Vec3 mean;
      for (auto w : adjacent[v]) mean += out.vertices[w];
      mean = mean / double(adjacent[v].size());
      const Vec3& d = edge_span[v];
      const double t = std::clamp(dot(mean - edge_start[v], d) / norm2(d), 0.05, 0.95);
      moved[v] = edge_start[v] + d * t;
    }
    out.vertices.swap(moved);
  }
  return out;
}

double enclosed_volume(const TriangleSurface& s) {
  double v = 0.0;
  for (const auto& t : s.triangles) v += dot(s.vertices[t[0]], cross(s.vertices[t[1]], s.vertices[t[2]]));
  return v / 6.0;
}

}  // namespace aorta::io
