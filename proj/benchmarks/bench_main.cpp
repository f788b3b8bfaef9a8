#include <benchmark/benchmark.h>

#include <random>

#include "aortamesh/fea.hpp"
#include "aortamesh/fitting.hpp"
#include "aortamesh/marching_cubes.hpp"
#include "aortamesh/sampling.hpp"
#include "aortamesh/solidify.hpp"
#include "aortamesh/spatial_index.hpp"
#include "aortamesh/synthetic.hpp"

using namespace aorta;

namespace {

std::vector<Vec3> random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return pts;
}

solid::HexMesh cylinder(std::size_t sections, std::size_t ring) {
  return solid::extrude_to_hex(synth::tube_quads(synth::constant_radius(15), 100, sections, ring), 2.0, 2);
}

}  // namespace

static void BM_KdTreeBuild(benchmark::State& state) {
  const auto pts = random_cloud(std::size_t(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(KdTree(pts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->Arg(10000)->Arg(100000);

static void BM_KdTreeNearest(benchmark::State& state) {
  const KdTree tree(random_cloud(std::size_t(state.range(0)), 1));
  const auto queries = random_cloud(1024, 2);
  for (auto _ : state)
    for (const auto& q : queries) benchmark::DoNotOptimize(tree.nearest(q));
  state.SetItemsProcessed(state.iterations() * 1024);
}
BENCHMARK(BM_KdTreeNearest)->Arg(10000)->Arg(100000);

static void BM_ChamferLossFullTemplate(benchmark::State& state) {
  const auto mesh = synth::tube_quads(synth::constant_radius(12), 150, 320, 78);
  const auto target =
      KdTree(io::sample_surface(synth::tube_surface(synth::gaussian_bulge(12, 10, 75, 20), 150, 301, 180), 100000, 1));
  for (auto _ : state) benchmark::DoNotOptimize(fit::chamfer_loss(mesh.vertices, target));
}
BENCHMARK(BM_ChamferLossFullTemplate)->Unit(benchmark::kMillisecond);

static void BM_TotalLossFullTemplate(benchmark::State& state) {
  const auto mesh = synth::tube_quads(synth::constant_radius(12), 150, 320, 78);
  const auto target =
      KdTree(io::sample_surface(synth::tube_surface(synth::gaussian_bulge(12, 10, 75, 20), 150, 301, 180), 100000, 1));
  for (auto _ : state) benchmark::DoNotOptimize(fit::total_loss(mesh, target, fit::LossWeights{}));
}
BENCHMARK(BM_TotalLossFullTemplate)->Unit(benchmark::kMillisecond);

static void BM_ElementStiffness(benchmark::State& state) {
  const auto mesh = cylinder(8, 16);
  const auto corners = solid::hex_corners(mesh, 0);
  for (auto _ : state) benchmark::DoNotOptimize(fea::element_stiffness(corners, fea::Material{}));
}
BENCHMARK(BM_ElementStiffness);

static void BM_Assemble(benchmark::State& state) {
  const auto mesh = cylinder(std::size_t(state.range(0)), 40);
  for (auto _ : state) benchmark::DoNotOptimize(fea::assemble_system(mesh, fea::Material{}, fea::BoundaryConditions{}));
  state.counters["hexes"] = double(mesh.hexes.size());
}
BENCHMARK(BM_Assemble)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

static void BM_SolvePressurizedCylinder(benchmark::State& state) {
  const auto mesh = cylinder(std::size_t(state.range(0)), 40);
  const auto sys = fea::assemble_system(mesh, fea::Material{}, fea::BoundaryConditions{});
  const auto loads = fea::pressure_loads(mesh, solid::kInnerSurface, 16.0);
  std::size_t iterations = 0;
  for (auto _ : state) {
    const auto r = fea::solve_system(sys, loads, 1e-8);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.displacements.data());
  }
  state.counters["pcg_iterations"] = double(iterations);
  state.counters["dofs"] = double(sys.K.n);
}
BENCHMARK(BM_SolvePressurizedCylinder)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

static void BM_MarchingCubesSphere(benchmark::State& state) {
  const auto mask = synth::sphere_mask(double(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(io::mask_to_surface(mask));
  state.counters["voxels"] = double(mask.values.size());
}
BENCHMARK(BM_MarchingCubesSphere)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
