#include "aortamesh/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "aortamesh/error.hpp"

namespace aorta::io {

namespace {

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementation.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

PointCloud sample_surface(const TriangleSurface& surface, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be at least 1");
  if (surface.triangles.empty()) throw Error(ErrorKind::DegenerateSurface, "surface has no triangles");
  std::vector<double> cumulative(surface.triangles.size());
  double total = 0.0;
  for (std::size_t t = 0; t < surface.triangles.size(); ++t) {
    const auto& tri = surface.triangles[t];
    for (auto v : tri) {
      if (v >= surface.vertices.size()) throw Error(ErrorKind::InvalidArgument, "triangle index out of range", {t});
    }
    total += triangle_area(surface.vertices[tri[0]], surface.vertices[tri[1]], surface.vertices[tri[2]]);
    cumulative[t] = total;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::DegenerateSurface, "surface has zero total area");

  std::mt19937_64 rng(seed);
  PointCloud out;
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = unit(rng) * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const auto& tri = surface.triangles[static_cast<std::size_t>(it - cumulative.begin())];
    const double r1 = std::sqrt(unit(rng));
    const double r2 = unit(rng);
    const Vec3& a = surface.vertices[tri[0]];
    const Vec3& b = surface.vertices[tri[1]];
    const Vec3& c = surface.vertices[tri[2]];
    out.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
  }
  return out;
}

}  // namespace aorta::io
