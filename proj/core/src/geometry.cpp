#include "aortamesh/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "aortamesh/error.hpp"
#include "aortamesh/spatial_index.hpp"

namespace aorta {

namespace {

// Consecutive duplicates are dropped; `kept` maps back to input indices.
struct CleanPolyline {
  std::vector<Vec3> points;
  std::vector<std::size_t> kept;
  std::vector<double> arclength;
};

CleanPolyline clean_polyline(std::span<const Vec3> poly) {
  CleanPolyline out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    if (!is_finite(poly[i])) {
      throw Error(ErrorKind::InvalidArgument, "non-finite polyline point " + std::to_string(i), {i});
    }
    if (!out.points.empty() && out.points.back() == poly[i]) continue;
    out.points.push_back(poly[i]);
    out.kept.push_back(i);
  }
  if (out.points.size() < 2) {
    throw Error(ErrorKind::DegeneratePolyline, "polyline needs at least 2 distinct points");
  }
  out.arclength.resize(out.points.size());
  out.arclength[0] = 0.0;
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    out.arclength[i] = out.arclength[i - 1] + distance(out.points[i - 1], out.points[i]);
  }
  return out;
}

struct SegmentParam {
  std::size_t segment;  // index into the cleaned polyline
  double fraction;
};

// Arc-length targets L*k/(n-1) located on the cleaned polyline.
std::vector<SegmentParam> uniform_params(const CleanPolyline& poly, std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "resample count must be >= 2");
  const double total = poly.arclength.back();
  const std::size_t last_seg = poly.points.size() - 2;
  std::vector<SegmentParam> params(n);
  params.front() = {0, 0.0};
  params.back() = {last_seg, 1.0};
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    auto it = std::upper_bound(poly.arclength.begin(), poly.arclength.end(), target);
    std::size_t seg = static_cast<std::size_t>(it - poly.arclength.begin());
    seg = std::clamp<std::size_t>(seg, 1, poly.points.size() - 1) - 1;
    const double len = poly.arclength[seg + 1] - poly.arclength[seg];
    params[k] = {seg, std::clamp((target - poly.arclength[seg]) / len, 0.0, 1.0)};
  }
  return params;
}

Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + (b - a) * t; }

Vec3 rotate_minimal(const Vec3& v, const Vec3& from, const Vec3& to) {
  const Vec3 axis = cross(from, to);
  const double s = norm(axis);
  const double c = dot(from, to);
  if (s < 1e-15) return v;
  const Vec3 k = axis / s;
  return v * c + cross(k, v) * s + k * (dot(k, v) * (1.0 - c));
}

}  // namespace

void validate(const LandmarkSet& lm) {
  const auto& h = lm.hinge_points;
  const double scale = std::max({distance(h[0], h[1]), distance(h[0], h[2]), distance(h[1], h[2])});
  if (!(scale > 0.0) || norm(cross(h[1] - h[0], h[2] - h[0])) <= 1e-9 * scale * scale) {
    throw Error(ErrorKind::InvalidArgument, "hinge points are collinear");
  }
  if (lm.end_curve.size() < 3) {
    throw Error(ErrorKind::InvalidArgument, "end curve needs at least 3 points");
  }
  for (std::size_t c = 0; c < lm.arch_curves.size(); ++c) {
    if (lm.arch_curves[c].size() < 3) {
      throw Error(ErrorKind::InvalidArgument,
                  "arch curve " + std::to_string(c) + " needs at least 3 points", {c});
    }
  }
  if (lm.centerline_points.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "centerline needs at least 2 points");
  }
  if (lm.centerline_radii) {
    if (lm.centerline_radii->size() != lm.centerline_points.size()) {
      throw Error(ErrorKind::InvalidArgument, "centerline radii and points differ in length");
    }
    for (std::size_t i = 0; i < lm.centerline_radii->size(); ++i) {
      if (!((*lm.centerline_radii)[i] > 0.0)) {
        throw Error(ErrorKind::InvalidRadius, "centerline radius " + std::to_string(i) + " not positive", {i});
      }
    }
  }
  if (lm.region_breakpoints) {
    const auto& b = *lm.region_breakpoints;
    if (!(b[0] < b[1] && b[1] < b[2])) {
      throw Error(ErrorKind::InvalidBreakpoints, "region breakpoints must be strictly increasing");
    }
  }
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * norm(cross(b - a, c - a));
}

void validate(const TriangleSurface& surface) {
  const std::size_t nv = surface.vertices.size();
  for (std::size_t t = 0; t < surface.triangles.size(); ++t) {
    const auto& tri = surface.triangles[t];
    if (tri[0] >= nv || tri[1] >= nv || tri[2] >= nv) {
      throw Error(ErrorKind::InvalidArgument, "triangle " + std::to_string(t) + " index out of range", {t});
    }
    const double area =
        triangle_area(surface.vertices[tri[0]], surface.vertices[tri[1]], surface.vertices[tri[2]]);
    if (area <= 1e-12) {
      throw Error(ErrorKind::DegenerateSurface, "triangle " + std::to_string(t) + " has zero area", {t});
    }
  }
}

double surface_area(const TriangleSurface& surface) {
  double total = 0.0;
  for (const auto& t : surface.triangles) {
    total += triangle_area(surface.vertices[t[0]], surface.vertices[t[1]], surface.vertices[t[2]]);
  }
  return total;
}

double polyline_length(std::span<const Vec3> poly) {
  double total = 0.0;
  for (std::size_t i = 1; i < poly.size(); ++i) total += distance(poly[i - 1], poly[i]);
  return total;
}

std::vector<Vec3> resample_polyline(std::span<const Vec3> poly, std::size_t n) {
  const CleanPolyline clean = clean_polyline(poly);
  const auto params = uniform_params(clean, n);
  std::vector<Vec3> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = params[k];
    out[k] = lerp(clean.points[p.segment], clean.points[p.segment + 1], p.fraction);
  }
  out.front() = poly.front();
  out.back() = poly.back();
  return out;
}

Centerline resample_centerline(const Centerline& centerline, std::size_t n) {
  if (centerline.radii.size() != centerline.points.size()) {
    throw Error(ErrorKind::InvalidArgument, "centerline radii and points differ in length");
  }
  const CleanPolyline clean = clean_polyline(centerline.points);
  const auto params = uniform_params(clean, n);
  Centerline out;
  out.points.resize(n);
  out.radii.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = params[k];
    out.points[k] = lerp(clean.points[p.segment], clean.points[p.segment + 1], p.fraction);
    const double r0 = centerline.radii[clean.kept[p.segment]];
    const double r1 = centerline.radii[clean.kept[p.segment + 1]];
    out.radii[k] = r0 + (r1 - r0) * p.fraction;
  }
  out.points.front() = centerline.points.front();
  out.points.back() = centerline.points.back();
  out.radii.front() = centerline.radii.front();
  out.radii.back() = centerline.radii.back();
  return out;
}

std::vector<Frame> transport_frames(std::span<const Vec3> pts, const FrameOptions& options) {
  const std::size_t n = pts.size();
  if (n < 2) throw Error(ErrorKind::DegeneratePolyline, "frame transport needs at least 2 points");

  std::vector<Vec3> tangents(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 d = i == 0 ? pts[1] - pts[0] : (i == n - 1 ? pts[n - 1] - pts[n - 2] : pts[i + 1] - pts[i - 1]);
    const double len = norm(d);
    if (!(len > 0.0)) {
      throw Error(ErrorKind::FrameTransport, "zero tangent at index " + std::to_string(i), {i});
    }
    tangents[i] = d / len;
  }
  if (options.start_tangent) tangents.front() = normalized(*options.start_tangent);
  if (options.end_tangent) tangents.back() = normalized(*options.end_tangent);

  for (std::size_t i = 1; i < n; ++i) {
    if (dot(tangents[i - 1], tangents[i]) <= -0.999) {
      throw Error(ErrorKind::FrameTransport,
                  "anti-parallel tangents between index " + std::to_string(i - 1) + " and " + std::to_string(i),
                  {i});
    }
  }

  std::vector<Frame> frames(n);
  const Vec3 t0 = tangents[0];
  // Seed with the global axis least aligned with the first tangent.
  const std::array<Vec3, 3> axes{Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
  int best = 0;
  for (int a = 1; a < 3; ++a) {
    if (std::abs(dot(axes[a], t0)) < std::abs(dot(axes[best], t0))) best = a;
  }
  Vec3 n0 = normalized(axes[best] - t0 * dot(axes[best], t0));
  frames[0] = {t0, n0, cross(t0, n0)};

  for (std::size_t i = 1; i < n; ++i) {
    const Vec3& t = tangents[i];
    Vec3 nv = rotate_minimal(frames[i - 1].N, tangents[i - 1], t);
    nv = normalized(nv - t * dot(nv, t));
    frames[i] = {t, nv, cross(t, nv)};
  }
  return frames;
}

std::vector<Frame> transport_frames(const Centerline& centerline, const FrameOptions& options) {
  return transport_frames(std::span<const Vec3>(centerline.points), options);
}

std::vector<double> compute_radii(std::span<const Vec3> points, const KdTree& surface_index) {
  if (surface_index.size() == 0) throw Error(ErrorKind::EmptyInput, "surface index is empty");
  std::vector<double> radii(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) radii[i] = surface_index.nearest(points[i]).distance;
  return radii;
}

Vec3 centroid(std::span<const Vec3> points) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "centroid of empty point set");
  Vec3 c;
  for (const auto& p : points) c += p;
  return c / static_cast<double>(points.size());
}

Plane fit_plane(std::span<const Vec3> points) {
  if (points.size() < 3) throw Error(ErrorKind::InvalidArgument, "plane fit needs at least 3 points");
  const Vec3 c = centroid(points);
  Mat3 cov{};
  for (const auto& p : points) {
    const Vec3 d = p - c;
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) cov[r][s] += d[r] * d[s];
  }
  const SymEigen3 eig = eigen_symmetric(cov);
  return {c, eig.vectors[0]};
}

SymEigen3 eigen_symmetric(const Mat3& m) {
  Mat3 a = m;
  Mat3 v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    if (off == 0.0) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] < a[j][j]; });
  SymEigen3 out;
  for (int k = 0; k < 3; ++k) {
    const int c = order[k];
    out.values[k] = a[c][c];
    out.vectors[k] = normalized(Vec3{v[0][c], v[1][c], v[2][c]});
  }
  return out;
}

std::array<double, 3> eigenvalues_symmetric(const Mat3& a) {
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  std::array<double, 3> w;
  if (p1 == 0.0) {
    w = {a[0][0], a[1][1], a[2][2]};
    std::sort(w.begin(), w.end());
    return w;
  }
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  const double b00 = a[0][0] - q;
  const double b11 = a[1][1] - q;
  const double b22 = a[2][2] - q;
  const double p2 = b00 * b00 + b11 * b11 + b22 * b22 + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  // det((A - qI) / p) / 2, clamped into acos's domain
  const double det = b00 * (b11 * b22 - a[1][2] * a[1][2]) - a[0][1] * (a[0][1] * b22 - a[1][2] * a[0][2]) +
                     a[0][2] * (a[0][1] * a[1][2] - b11 * a[0][2]);
  const double r = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double hi = q + 2.0 * p * std::cos(phi);
  const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  w = {lo, 3.0 * q - hi - lo, hi};

  // Newton polish on the characteristic polynomial; keeps a step only if it
  // reduces the residual.
  const double c2 = -(a[0][0] + a[1][1] + a[2][2]);
  const double c1 = a[0][0] * a[1][1] + a[0][0] * a[2][2] + a[1][1] * a[2][2] - a[0][1] * a[0][1] -
                    a[0][2] * a[0][2] - a[1][2] * a[1][2];
  const double c0 = -(a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[1][2]) -
                      a[0][1] * (a[0][1] * a[2][2] - a[1][2] * a[0][2]) +
                      a[0][2] * (a[0][1] * a[1][2] - a[1][1] * a[0][2]));
  auto f = [&](double x) { return ((x + c2) * x + c1) * x + c0; };
  auto df = [&](double x) { return (3.0 * x + 2.0 * c2) * x + c1; };
  for (double& x : w) {
    for (int it = 0; it < 2; ++it) {
      const double d = df(x);
      if (d == 0.0) break;
      const double cand = x - f(x) / d;
      if (std::abs(f(cand)) < std::abs(f(x))) x = cand;
      else break;
    }
  }
  std::sort(w.begin(), w.end());
  return w;
}

Vec3 rotate(const Mat3& r, const Vec3& v) {
  return {r[0][0] * v.x + r[0][1] * v.y + r[0][2] * v.z, r[1][0] * v.x + r[1][1] * v.y + r[1][2] * v.z,
          r[2][0] * v.x + r[2][1] * v.y + r[2][2] * v.z};
}

}  // namespace aorta
