#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <numbers>

#include "aortamesh/geometry.hpp"
#include "aortamesh/spatial_index.hpp"
#include "test_support.hpp"

using namespace aorta;
using testing_support::random_vec;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_orthonormal(const Frame& f) {
  EXPECT_NEAR(norm(f.T), 1.0, 1e-9);
  EXPECT_NEAR(norm(f.N), 1.0, 1e-9);
  EXPECT_NEAR(norm(f.B), 1.0, 1e-9);
  EXPECT_LT(std::abs(dot(f.T, f.N)), 1e-9);
  EXPECT_LT(std::abs(dot(f.T, f.B)), 1e-9);
  EXPECT_LT(std::abs(dot(f.N, f.B)), 1e-9);
  EXPECT_GT(dot(cross(f.T, f.N), f.B), 0.999999);
}

std::vector<Vec3> helix(std::size_t n) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 4.0 * kPi * double(i) / double(n - 1);
    pts.push_back({20 * std::cos(t), 20 * std::sin(t), 8 * t});
  }
  return pts;
}

}  // namespace

TEST(Resample, StraightSegmentMidpoint) {
  const std::vector<Vec3> poly{{0, 0, 0}, {0, 0, 10}};
  const auto out = resample_polyline(poly, 3);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].z, 0.0);
  EXPECT_DOUBLE_EQ(out[1].z, 5.0);
  EXPECT_EQ(out[2].z, 10.0);
  EXPECT_EQ(out[1].x, 0.0);
}

TEST(Resample, TwoPointsKeepsEndpointsExactly) {
  std::mt19937_64 rng(3);
  std::vector<Vec3> poly;
  for (int i = 0; i < 7; ++i) poly.push_back(random_vec(rng, -50, 50));
  const auto out = resample_polyline(poly, 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].x, poly.front().x);
  EXPECT_EQ(out[0].y, poly.front().y);
  EXPECT_EQ(out[0].z, poly.front().z);
  EXPECT_EQ(out[1].x, poly.back().x);
  EXPECT_EQ(out[1].y, poly.back().y);
  EXPECT_EQ(out[1].z, poly.back().z);
}

TEST(Resample, QuarterCircleFollowsLinearInterpolant) {
  std::vector<Vec3> coarse;
  for (int k = 0; k < 5; ++k) {
    const double t = 0.5 * kPi * k / 4.0;
    coarse.push_back({10 * std::cos(t), 10 * std::sin(t), 0});
  }
  // Equal chords, so the 9 samples are the 5 coarse points and the 4 chord
  // midpoints. Coarse points are on the arc; midpoints sit r(1 - cos(pi/16))
  // inside it.
  const auto out = resample_polyline(coarse, 9);
  const double sag = 10.0 * (1.0 - std::cos(kPi / 16.0));
  for (int k = 0; k < 9; ++k) {
    const double t = 0.5 * kPi * k / 8.0;
    const Vec3 exact{10 * std::cos(t), 10 * std::sin(t), 0};
    if (k % 2 == 0) {
      EXPECT_LT(distance(out[k], exact), 1e-9) << "sample " << k;
    } else {
      const Vec3 mid = (coarse[k / 2] + coarse[k / 2 + 1]) * 0.5;
      EXPECT_LT(distance(out[k], mid), 1e-9) << "sample " << k;
      EXPECT_NEAR(distance(out[k], exact), sag, 1e-9) << "sample " << k;
    }
  }
}

TEST(Resample, UniformSpacingAndLengthOnCollinearInput) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> step(0.1, 5.0);
  const Vec3 dir = normalized(Vec3{1, 2, -0.5});
  std::vector<Vec3> poly{{1, 2, 3}};
  for (int i = 0; i < 40; ++i) poly.push_back(poly.back() + dir * step(rng));
  const auto out = resample_polyline(poly, 320);
  ASSERT_EQ(out.size(), 320u);
  const double len = polyline_length(poly);
  EXPECT_LT(testing_support::rel_err(polyline_length(out), len), 1e-9);
  const double h = len / 319.0;
  for (std::size_t i = 1; i < out.size(); ++i) EXPECT_LT(std::abs(distance(out[i], out[i - 1]) - h), 1e-6 * h);
}

TEST(Resample, IdempotentOnEqualChordInput) {
  // A helix sampled uniformly in its parameter has equal chords.
  const auto once = resample_polyline(helix(120), 120);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_LT(distance(once[i], helix(120)[i]), 1e-9);
  const auto twice = resample_polyline(once, 120);
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_LT(distance(once[i], twice[i]), 1e-9);
  EXPECT_LT(testing_support::rel_err(polyline_length(once), polyline_length(twice)), 1e-9);
}

TEST(Resample, DropsRepeatedPoints) {
  const std::vector<Vec3> poly{{0, 0, 0}, {0, 0, 0}, {0, 0, 4}, {0, 0, 4}, {0, 0, 8}};
  const auto out = resample_polyline(poly, 5);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(out[k].z, 2.0 * k, 1e-12);
}

TEST(Resample, DegenerateInputThrows) {
  const std::vector<Vec3> same{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
  EXPECT_AORTA_ERROR(resample_polyline(same, 5), ErrorKind::DegeneratePolyline);
  const std::vector<Vec3> one{{1, 1, 1}};
  EXPECT_AORTA_ERROR(resample_polyline(one, 5), ErrorKind::DegeneratePolyline);
}

TEST(ResampleCenterline, InterpolatesRadii) {
  Centerline c{{{0, 0, 0}, {0, 0, 10}}, {10, 20}};
  const auto out = resample_centerline(c, 11);
  ASSERT_EQ(out.radii.size(), 11u);
  for (int k = 0; k <= 10; ++k) EXPECT_NEAR(out.radii[k], 10.0 + k, 1e-12);
}

TEST(Frames, StraightLineIsIdentityTransport) {
  std::vector<Vec3> line;
  for (int i = 0; i < 50; ++i) line.push_back({0, 0, 2.0 * i});
  const auto frames = transport_frames(line);
  for (const auto& f : frames) {
    EXPECT_NEAR(f.T.z, 1.0, 1e-12);
    EXPECT_NEAR(f.N.x, 1.0, 1e-12);
    EXPECT_NEAR(f.B.y, 1.0, 1e-12);
    expect_orthonormal(f);
  }
}

TEST(Frames, HelixTriadsOrthonormal) {
  const auto pts = resample_polyline(helix(200), 320);
  const auto frames = transport_frames(pts);
  ASSERT_EQ(frames.size(), 320u);
  for (const auto& f : frames) expect_orthonormal(f);
}

TEST(Frames, PlanarArcKeepsPlaneNormalFixed) {
  // Arc in the xz-plane. The seed axis least aligned with T0 is y, so the
  // rotation-minimizing frame keeps N on the plane normal and sweeps B in-plane.
  std::vector<Vec3> arc;
  for (int i = 0; i < 100; ++i) {
    const double t = 0.5 * kPi * i / 99.0;
    arc.push_back({10 * std::cos(t), 0, 10 * std::sin(t)});
  }
  const auto frames = transport_frames(arc);
  for (const auto& f : frames) {
    EXPECT_NEAR(std::abs(f.N.y), 1.0, 1e-6);
    EXPECT_LT(std::abs(f.B.y), 1e-6);
    EXPECT_LT(std::abs(f.T.y), 1e-12);
    expect_orthonormal(f);
  }
}

TEST(Frames, RotationMinimizingHasNoTwist) {
  // Discrete RMF: N_{i+1} is the minimal rotation of N_i, so N_{i+1} has no
  // component along B_i beyond what the tangent change forces.
  const auto pts = resample_polyline(helix(300), 320);
  const auto frames = transport_frames(pts);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    const double twist = dot(frames[i].N, frames[i - 1].B) + dot(frames[i].B, frames[i - 1].N) * -1.0;
    const double bend = norm(frames[i].T - frames[i - 1].T);
    EXPECT_LT(std::abs(twist), 2.0 * bend * bend + 1e-12);
  }
}

TEST(Frames, AntiParallelTangentsNameIndex) {
  const std::vector<Vec3> pts{{0, 0, 0}, {0, 0, 1}, {0, 0, 2}, {0, 0, 1.5}};
  try {
    transport_frames(pts);
    FAIL() << "expected FrameTransport";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FrameTransport);
    ASSERT_EQ(e.indices().size(), 1u);
    EXPECT_EQ(e.indices()[0], 3u);
  }
}

TEST(Frames, TangentOverridesApply) {
  std::vector<Vec3> line;
  for (int i = 0; i < 10; ++i) line.push_back({0, 0, double(i)});
  FrameOptions opt;
  opt.start_tangent = Vec3{0.1, 0, 1};
  const auto frames = transport_frames(line, opt);
  EXPECT_NEAR(dot(frames[0].T, normalized(Vec3{0.1, 0, 1})), 1.0, 1e-12);
  for (const auto& f : frames) expect_orthonormal(f);
}

TEST(Radii, CylinderAxisDistance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> cloud;
  for (int i = 0; i < 100000; ++i) {
    const double t = 2 * kPi * u(rng);
    cloud.push_back({12 * std::cos(t), 12 * std::sin(t), 100 * u(rng)});
  }
  const KdTree index(cloud);
  std::vector<Vec3> axis;
  for (int i = 0; i < 20; ++i) axis.push_back({0, 0, 10.0 + 4.0 * i});
  for (double r : compute_radii(axis, index)) EXPECT_NEAR(r, 12.0, 0.2);
  const std::vector<Vec3> on_sample{cloud[42]};
  EXPECT_EQ(compute_radii(on_sample, index)[0], 0.0);
  EXPECT_AORTA_ERROR(compute_radii(axis, KdTree{}), ErrorKind::EmptyInput);
}

TEST(Radii, MatchesExhaustiveMinimum) {
  std::mt19937_64 rng(6);
  std::vector<Vec3> cloud;
  for (int i = 0; i < 5000; ++i) cloud.push_back(random_vec(rng, -30, 30));
  const KdTree index(cloud);
  for (int q = 0; q < 50; ++q) {
    const Vec3 p = random_vec(rng, -40, 40);
    double best = 1e300;
    for (const auto& c : cloud) best = std::min(best, distance(p, c));
    const std::vector<Vec3> one{p};
    EXPECT_EQ(compute_radii(one, index)[0], best);
  }
}

TEST(PlaneFit, RecoversTiltedPlane) {
  std::mt19937_64 rng(7);
  const Vec3 n = normalized(Vec3{0.3, -0.4, 0.8});
  const Vec3 u = normalized(cross(n, Vec3{1, 0, 0}));
  const Vec3 v = cross(n, u);
  std::vector<Vec3> pts;
  for (int i = 0; i < 30; ++i) {
    const Vec3 r = random_vec(rng, -5, 5);
    pts.push_back(Vec3{1, 2, 3} + u * r.x + v * r.y);
  }
  const Plane p = fit_plane(pts);
  EXPECT_NEAR(std::abs(dot(p.normal, n)), 1.0, 1e-12);
  for (const auto& q : pts) EXPECT_LT(std::abs(p.signed_distance(q)), 1e-9);
}

TEST(Eigen3x3, MatchesEigenOnRandomSymmetric) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    Mat3 m{};
    Eigen::Matrix3d e;
    for (int r = 0; r < 3; ++r)
      for (int c = r; c < 3; ++c) {
        const double v = random_vec(rng, -100, 100).x;
        m[r][c] = m[c][r] = v;
        e(r, c) = e(c, r) = v;
      }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(e);
    const auto closed = eigenvalues_symmetric(m);
    const auto jacobi = eigen_symmetric(m);
    const double scale = solver.eigenvalues().cwiseAbs().maxCoeff();
    for (int k = 0; k < 3; ++k) {
      EXPECT_NEAR(closed[k], solver.eigenvalues()[k], 1e-9 * scale);
      EXPECT_NEAR(jacobi.values[k], solver.eigenvalues()[k], 1e-9 * scale);
      const Vec3 mv = rotate(m, jacobi.vectors[k]);
      EXPECT_LT(norm(mv - jacobi.vectors[k] * jacobi.values[k]), 1e-9 * scale);
    }
  }
}

TEST(Landmarks, ValidationRejectsCollinearHinges) {
  LandmarkSet lm;
  lm.hinge_points = {Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{2, 0, 0}};
  lm.end_curve = {{0, 0, 10}, {1, 0, 10}, {0, 1, 10}};
  lm.centerline_points = {{0, 0, 0}, {0, 0, 10}};
  EXPECT_AORTA_ERROR(validate(lm), ErrorKind::InvalidArgument);
  lm.hinge_points[2] = {0, 1, 0};
  EXPECT_NO_THROW(validate(lm));
  lm.region_breakpoints = std::array<std::size_t, 3>{5, 5, 9};
  EXPECT_THROW(validate(lm), Error);
}

TEST(Surface, AreaAndValidation) {
  TriangleSurface s{{{0, 0, 0}, {2, 0, 0}, {0, 2, 0}}, {{0, 1, 2}}};
  EXPECT_DOUBLE_EQ(surface_area(s), 2.0);
  EXPECT_NO_THROW(validate(s));
  s.triangles.push_back({0, 1, 7});
  EXPECT_THROW(validate(s), Error);
}
