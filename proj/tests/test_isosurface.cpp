#include <gtest/gtest.h>

#include <chrono>
#include <map>
#include <numbers>
#include <set>

#include "aortamesh/marching_cubes.hpp"
#include "aortamesh/synthetic.hpp"
#include "test_support.hpp"

using namespace aorta;
using namespace aorta::io;

namespace {

VoxelMask blank(std::size_t nx, std::size_t ny, std::size_t nz) {
  VoxelMask m;
  m.dims = {nx, ny, nz};
  m.values.assign(nx * ny * nz, 0);
  return m;
}

// Every undirected edge used by exactly two triangles with opposite
// orientations. Returns the number of violating edges.
std::size_t open_edges(const TriangleSurface& s) {
  std::map<std::pair<std::size_t, std::size_t>, int> directed;
  for (const auto& t : s.triangles)
    for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
  std::size_t bad = 0;
  for (const auto& [e, n] : directed) {
    const auto it = directed.find({e.second, e.first});
    if (n != 1 || it == directed.end() || it->second != 1) ++bad;
  }
  return bad;
}

}  // namespace

TEST(CaseTable, EdgesAndTrivialCases) {
  const auto& edges = cube_edges();
  for (const auto& e : edges) {
    EXPECT_LT(e[0], e[1]);
    EXPECT_EQ(__builtin_popcount(e[0] ^ e[1]), 1);
  }
  const auto& table = case_table();
  EXPECT_TRUE(table[0].empty());
  EXPECT_TRUE(table[255].empty());
}

TEST(CaseTable, TrianglesUseExactlyTheCrossingEdges) {
  const auto& edges = cube_edges();
  const auto& table = case_table();
  for (int c = 0; c < 256; ++c) {
    std::set<int> crossing, used;
    for (int e = 0; e < 12; ++e)
      if (((c >> edges[e][0]) & 1) != ((c >> edges[e][1]) & 1)) crossing.insert(e);
    for (const auto& t : table[c]) {
      EXPECT_TRUE(t[0] != t[1] && t[1] != t[2] && t[0] != t[2]) << c;
      used.insert(t.begin(), t.end());
    }
    EXPECT_EQ(used, crossing) << "case " << c;
  }
}

TEST(CaseTable, NoTriangleLiesInACubeFace) {
  const auto& edges = cube_edges();
  const auto& table = case_table();
  for (int c = 0; c < 256; ++c) {
    for (const auto& t : table[c]) {
      // Bits shared by all six endpoint corners identify a common face.
      int all_set = 7, all_clear = 7;
      for (auto e : t)
        for (auto corner : edges[e]) {
          all_set &= corner;
          all_clear &= ~corner;
        }
      EXPECT_EQ(all_set | all_clear, 0) << "case " << c;
    }
  }
}

TEST(MarchingCubes, SingleVoxelOctahedron) {
  auto m = blank(3, 3, 3);
  m.values[m.index(1, 1, 1)] = 1;
  const auto s = mask_to_surface(m, 0.5, 0);
  EXPECT_EQ(s.vertices.size(), 6u);
  EXPECT_EQ(s.triangles.size(), 8u);
  EXPECT_EQ(open_edges(s), 0u);
  EXPECT_NEAR(surface_area(s), std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(enclosed_volume(s), 1.0 / 6.0, 1e-12);
}

TEST(MarchingCubes, RandomMasksAreClosedAndOutward) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 200; ++t) {
    auto m = blank(7, 6, 8);
    for (std::size_t k = 1; k + 1 < 8; ++k)
      for (std::size_t j = 1; j + 1 < 6; ++j)
        for (std::size_t i = 1; i + 1 < 7; ++i) m.values[m.index(i, j, k)] = rng() % 2;
    m.values[m.index(3, 3, 3)] = 1;
    const auto s = mask_to_surface(m, 0.5, t % 2 ? 5 : 0);
    EXPECT_EQ(open_edges(s), 0u) << t;
    EXPECT_GT(enclosed_volume(s), 0.0) << t;
  }
}

TEST(MarchingCubes, SphereAreaAndVolume) {
  const double r = 10.0;
  const auto start = std::chrono::steady_clock::now();
  const auto s = mask_to_surface(synth::sphere_mask(r, 1.0));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(open_edges(s), 0u);
  EXPECT_LT(testing_support::rel_err(surface_area(s), 4 * std::numbers::pi * r * r), 0.05);
  EXPECT_LT(testing_support::rel_err(enclosed_volume(s), 4.0 / 3.0 * std::numbers::pi * r * r * r), 0.05);
  EXPECT_LT(secs, 10.0);
}

TEST(MarchingCubes, SmoothingReducesStaircaseArea) {
  const auto m = synth::sphere_mask(8.0, 1.0);
  const double exact = 4 * std::numbers::pi * 64;
  const double raw = surface_area(mask_to_surface(m, 0.5, 0));
  const double smooth = surface_area(mask_to_surface(m, 0.5, 20));
  EXPECT_GT(raw, 1.03 * exact);
  EXPECT_LT(std::abs(smooth - exact), std::abs(raw - exact));
}

TEST(MarchingCubes, VerticesStayOnGridEdges) {
  auto m = synth::cylinder_mask(4.0, 10.0, 0.5);
  m.origin = {-3, 2, 7};
  const auto s = mask_to_surface(m, 0.5, 20);
  for (const auto& v : s.vertices) {
    int on_grid = 0;
    for (int k = 0; k < 3; ++k) {
      const double g = (v[k] - m.origin[k]) / m.spacing[k];
      const double frac = g - std::floor(g);
      if (std::abs(g - std::round(g)) < 1e-9) {
        ++on_grid;
      } else {
        EXPECT_GE(frac, 0.05 - 1e-12);
        EXPECT_LE(frac, 0.95 + 1e-12);
      }
    }
    EXPECT_EQ(on_grid, 2);
  }
}

TEST(MarchingCubes, WorldCoordinatesFollowSpacingAndOrigin) {
  auto m = synth::sphere_mask(5.0, 1.0);
  const auto base = mask_to_surface(m, 0.5, 0);
  m.spacing = {2, 2, 2};
  m.origin = {10, 20, 30};
  const auto scaled = mask_to_surface(m, 0.5, 0);
  EXPECT_NEAR(surface_area(scaled), 4 * surface_area(base), 1e-9 * surface_area(scaled));
  EXPECT_NEAR(enclosed_volume(scaled), 8 * enclosed_volume(base), 1e-9 * enclosed_volume(scaled));
}

TEST(MarchingCubes, CylinderVolume) {
  const auto s = mask_to_surface(synth::cylinder_mask(6.0, 20.0, 0.5));
  EXPECT_EQ(open_edges(s), 0u);
  EXPECT_LT(testing_support::rel_err(enclosed_volume(s), std::numbers::pi * 36 * 20), 0.05);
}

TEST(MarchingCubes, UniformMaskThrows) {
  auto m = blank(4, 4, 4);
  EXPECT_AORTA_ERROR(mask_to_surface(m), ErrorKind::NoIsosurface);
  std::fill(m.values.begin(), m.values.end(), 1);
  EXPECT_AORTA_ERROR(mask_to_surface(m), ErrorKind::NoIsosurface);
}

TEST(EnclosedVolume, UnitCube) {
  TriangleSurface cube;
  for (int c = 0; c < 8; ++c) cube.vertices.push_back({double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)});
  // Outward quads split in two.
  const std::array<std::array<std::size_t, 4>, 6> faces{{{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                                         {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}}};
  for (const auto& f : faces) {
    cube.triangles.push_back({f[0], f[1], f[2]});
    cube.triangles.push_back({f[0], f[2], f[3]});
  }
  EXPECT_EQ(open_edges(cube), 0u);
  EXPECT_NEAR(enclosed_volume(cube), 1.0, 1e-15);
}
