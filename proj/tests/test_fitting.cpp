#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <numeric>

#include "aortamesh/fitting.hpp"
#include "aortamesh/synthetic.hpp"
#include "gradient_check.hpp"
#include "test_support.hpp"

using namespace aorta;
using namespace aorta::fit;
using testing_support::random_vec;

namespace {

double exhaustive_chamfer(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto one_way = [](const std::vector<Vec3>& p, const std::vector<Vec3>& q) {
    double sum = 0.0;
    for (const auto& x : p) {
      double best = 1e300;
      for (const auto& y : q) best = std::min(best, distance2(x, y));
      sum += best;
    }
    return sum / double(p.size());
  };
  return one_way(a, b) + one_way(b, a);
}

tube::QuadMesh unit_square() {
  tube::QuadMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  m.quads = {{0, 1, 2, 3}};
  return m;
}

struct DirectQuality {
  double area, flatness, angle, edge;
};

// Plain evaluation of the four quality formulas for one quad.
DirectQuality direct_single_quad(const std::array<Vec3, 4>& p) {
  DirectQuality q{};
  q.area = 0.0;  // single quad: A_q equals the mean
  const Vec3 c = (p[0] + p[1] + p[2] + p[3]) * 0.25;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& v : p) {
    const Eigen::Vector3d d(v.x - c.x, v.y - c.y, v.z - c.z);
    cov += d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  const double rms2 = es.eigenvalues()[0] / 4.0;
  const double area = 0.5 * norm(cross(p[2] - p[0], p[3] - p[1]));
  q.flatness = rms2 / area;
  double angle = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Vec3 a = p[(k + 1) % 4] - p[k];
    const Vec3 b = p[(k + 3) % 4] - p[k];
    const double cs = dot(a, b) / (norm(a) * norm(b));
    angle += cs * cs;
  }
  q.angle = angle / 4.0;
  double mean = 0.0, sq = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double l = distance(p[k], p[(k + 1) % 4]);
    mean += l / 4.0;
    sq += l * l / 4.0;
  }
  q.edge = (sq - mean * mean) / (mean * mean);
  return q;
}

}  // namespace

TEST(Chamfer, IdenticalSetsAreZero) {
  std::mt19937_64 rng(1);
  std::vector<Vec3> a;
  for (int i = 0; i < 100; ++i) a.push_back(random_vec(rng, -5, 5));
  const auto r = chamfer_loss(a, KdTree(a));
  EXPECT_EQ(r.value, 0.0);
  for (const auto& g : r.gradient) EXPECT_EQ(norm(g), 0.0);
}

TEST(Chamfer, SinglePointClosedForm) {
  const std::vector<Vec3> a{{0, 0, 0}};
  const auto r = chamfer_loss(a, KdTree(std::vector<Vec3>{{1, 0, 0}}));
  EXPECT_DOUBLE_EQ(r.value, 2.0);
  EXPECT_DOUBLE_EQ(r.a_to_b, 1.0);
  EXPECT_DOUBLE_EQ(r.b_to_a, 1.0);
  EXPECT_DOUBLE_EQ(r.gradient[0].x, -4.0);
  EXPECT_DOUBLE_EQ(r.grad_a_to_b[0].x, -2.0);
  EXPECT_DOUBLE_EQ(r.grad_b_to_a[0].x, -2.0);
}

TEST(Chamfer, MatchesExhaustiveAndIsSymmetric) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vec3> a, b;
    for (int i = 0; i < 200; ++i) a.push_back(random_vec(rng, -3, 3));
    for (int i = 0; i < 200; ++i) b.push_back(random_vec(rng, -3, 3));
    const double ab = chamfer_loss(a, KdTree(b)).value;
    const double ba = chamfer_loss(b, KdTree(a)).value;
    const double exact = exhaustive_chamfer(a, b);
    EXPECT_NEAR(ab, exact, 1e-12 * exact);
    EXPECT_NEAR(ab, ba, 1e-12 * exact);
  }
}

TEST(Chamfer, EmptyInputThrows) {
  EXPECT_AORTA_ERROR(chamfer_loss({}, KdTree(std::vector<Vec3>{{0, 0, 0}})), ErrorKind::EmptyInput);
  EXPECT_AORTA_ERROR(chamfer_loss(std::vector<Vec3>{{0, 0, 0}}, KdTree{}), ErrorKind::EmptyInput);
}

TEST(Quality, StraightTubeIsFlatAndRightAngled) {
  tube::QuadMesh m = synth::tube_quads(synth::constant_radius(5.0), 20.0, 11, 4);
  const auto q = quality_loss(m);
  EXPECT_LT(q.flatness, 1e-15);
  EXPECT_LT(q.angle, 1e-30);
  EXPECT_LT(q.area, 1e-28);
}

TEST(Quality, LiftedSquareMatchesDirectFormulas) {
  auto m = unit_square();
  m.vertices[2].z = 0.2;
  const auto q = quality_loss(m);
  const auto d = direct_single_quad({m.vertices[0], m.vertices[1], m.vertices[2], m.vertices[3]});
  EXPECT_NEAR(q.area, d.area, 1e-14);
  EXPECT_NEAR(q.flatness, d.flatness, 1e-12 * d.flatness);
  EXPECT_NEAR(q.angle, d.angle, 1e-12 * d.angle);
  EXPECT_NEAR(q.edge, d.edge, 1e-12 * d.edge);
  EXPECT_GT(q.flatness, 0.0);
}

TEST(Quality, ScaleInvariant) {
  std::mt19937_64 rng(3);
  const auto m = testing_support::random_two_ring_mesh(rng);
  auto big = m;
  for (auto& v : big.vertices) v = v * 2.0;
  const auto a = quality_loss(m);
  const auto b = quality_loss(big);
  EXPECT_NEAR(a.area, b.area, 1e-9 * std::max(a.area, 1e-300));
  EXPECT_NEAR(a.flatness, b.flatness, 1e-9 * a.flatness);
  EXPECT_NEAR(a.angle, b.angle, 1e-9 * a.angle);
  EXPECT_NEAR(a.edge, b.edge, 1e-9 * a.edge);
}

TEST(Quality, DegenerateQuadNamed) {
  tube::QuadMesh m;
  m.vertices = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  m.quads = {{0, 1, 2, 3}, {4, 5, 6, 7}};
  try {
    quality_loss(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateElement);
    ASSERT_EQ(e.indices().size(), 1u);
    EXPECT_EQ(e.indices()[0], 1u);
  }
}

TEST(Gradients, RandomTwoRingMeshes) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mesh = testing_support::random_two_ring_mesh(rng);
    const KdTree target(testing_support::smooth_cloud_near(mesh, 60, rng));
    for (auto term : testing_support::kAllTerms) {
      const auto r = testing_support::check_term(term, mesh, target);
      EXPECT_TRUE(r.ok()) << testing_support::term_name(term) << " trial " << trial << " rel " << r.max_rel_error
                          << " abs " << r.max_abs_error;
    }
  }
}

TEST(TotalLoss, ZeroWhenSamplesAreTheTarget) {
  const auto m = synth::tube_quads(synth::constant_radius(5.0), 20.0, 6, 8);
  const KdTree target(template_samples(m).points);
  const auto r = total_loss(m, target, LossWeights{1.0, 0.0, 0.0, 0.0, 0.0});
  EXPECT_EQ(r.value.total, 0.0);
}

TEST(TotalLoss, ChamferOnlyEqualsChamferOfSamples) {
  std::mt19937_64 rng(5);
  const auto m = testing_support::random_two_ring_mesh(rng);
  const KdTree target(testing_support::random_cloud_near(m, 100, rng));
  const auto r = total_loss(m, target, LossWeights{1.0, 0.0, 0.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(r.value.total, chamfer_loss(template_samples(m).points, target).value);
}

TEST(TotalLoss, WeightedSumOfComponents) {
  std::mt19937_64 rng(6);
  const auto m = testing_support::random_two_ring_mesh(rng);
  const KdTree target(testing_support::random_cloud_near(m, 100, rng));
  const LossWeights w{2.0, 0.3, 0.7, 0.5, 0.2};
  const auto r = total_loss(m, target, w).value;
  const double sum = w.chamfer * r.chamfer + w.area * r.area + w.flatness * r.flatness + w.angle * r.angle +
                     w.edge * r.edge;
  EXPECT_NEAR(r.total, sum, 1e-12 * sum);
  EXPECT_GE(r.total, 0.0);
}

TEST(TotalLoss, SamplesAreVerticesThenCentroids) {
  const auto m = synth::tube_quads(synth::constant_radius(5.0), 20.0, 3, 6);
  const auto s = template_samples(m);
  EXPECT_EQ(s.points.size(), m.vertices.size() + m.quads.size());
  EXPECT_EQ(distance(s.points.back(), tube::quad_centroid(m, m.quads.size() - 1)), 0.0);
}

TEST(Config, Validation) {
  FitConfig c;
  EXPECT_NO_THROW(validate(c));
  c.max_iters = 0;
  EXPECT_THROW(validate(c), Error);
  c = {};
  c.step_size = 0.0;
  EXPECT_THROW(validate(c), Error);
  LossWeights w;
  w.chamfer = 0.0;
  EXPECT_THROW(validate(w), Error);
  w = {};
  w.edge = -1.0;
  EXPECT_THROW(validate(w), Error);
}

TEST(Fit, SelfTargetStopsImmediately) {
  const auto m = synth::tube_quads(synth::constant_radius(10.0), 60.0, 31, 24);
  const KdTree target(template_samples(m).points);
  FitConfig cfg;
  const auto r = fit_template(m, target, cfg);
  EXPECT_LE(r.report.final_chamfer_rms, 0.05);
  EXPECT_LE(r.report.iterations_run, 100u);
  EXPECT_EQ(r.report.loss_history.size(), r.report.iterations_run);
  EXPECT_EQ(r.report.terminated_by, Termination::TargetReached);
}

TEST(Fit, RecoversRigidOffset) {
  const auto profile = synth::constant_radius(10.0);
  const auto m = synth::tube_quads(profile, 60.0, 41, 32);
  auto surf = synth::tube_surface(profile, 60.0, 121, 96);
  for (auto& v : surf.vertices) v.x += 3.0;
  FitConfig cfg;
  cfg.target_chamfer_rms = 0.2;
  cfg.max_iters = 800;
  const auto r = fit_template(m, KdTree(surf.vertices), cfg);
  EXPECT_LE(r.report.final_chamfer_rms, 0.5);
  EXPECT_EQ(r.mesh.quads, m.quads);
  EXPECT_TRUE(moving_average_non_increasing(
      [&] {
        std::vector<double> t;
        for (const auto& rec : r.report.loss_history) t.push_back(rec.total);
        return t;
      }(),
      50));
}

TEST(Fit, DeterministicHistory) {
  const auto profile = synth::gaussian_bulge(8.0, 3.0, 20.0, 8.0);
  const auto m = synth::tube_quads(synth::constant_radius(8.0), 40.0, 21, 16);
  const KdTree target(synth::tube_surface(profile, 40.0, 81, 64).vertices);
  FitConfig cfg;
  cfg.max_iters = 60;
  const auto a = fit_template(m, target, cfg);
  const auto b = fit_template(m, target, cfg);
  ASSERT_EQ(a.report.loss_history.size(), b.report.loss_history.size());
  for (std::size_t i = 0; i < a.report.loss_history.size(); ++i)
    EXPECT_EQ(a.report.loss_history[i].total, b.report.loss_history[i].total);
  EXPECT_EQ(a.mesh.vertices.size(), b.mesh.vertices.size());
  for (std::size_t v = 0; v < a.mesh.vertices.size(); ++v) EXPECT_EQ(distance(a.mesh.vertices[v], b.mesh.vertices[v]), 0.0);
}

TEST(Fit, MovingAverageHelper) {
  std::vector<double> down(200);
  std::iota(down.rbegin(), down.rend(), 1.0);
  EXPECT_TRUE(moving_average_non_increasing(down, 50));
  down[150] = 1e6;
  EXPECT_FALSE(moving_average_non_increasing(down, 50));
}

TEST(Smoothing, SolveInvertsApply) {
  std::mt19937_64 rng(9);
  const auto m = synth::tube_quads(synth::constant_radius(10.0), 30.0, 12, 10);
  const SmoothingOperator op(m, 5.0);
  std::vector<Vec3> x;
  for (std::size_t i = 0; i < m.vertices.size(); ++i) x.push_back(random_vec(rng, -3, 3));
  const auto back = op.solve(op.apply(x), std::vector<Vec3>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_LT(distance(back[i], x[i]), 1e-9);
  // Constant fields are in the Laplacian kernel.
  const std::vector<Vec3> c(x.size(), Vec3{1, 2, 3});
  for (const auto& y : op.apply(c)) EXPECT_LT(distance(y, Vec3{1, 2, 3}), 1e-12);
}

TEST(Smoothing, ZeroLambdaIsIdentity) {
  const auto m = synth::tube_quads(synth::constant_radius(10.0), 30.0, 5, 6);
  const SmoothingOperator op(m, 0.0);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) EXPECT_EQ(op.apply(m.vertices)[i].x, m.vertices[i].x);
}

TEST(Fit, ConnectivityUntouchedWithHoles) {
  const auto profile = synth::constant_radius(10.0);
  const auto m = tube::cut_branch_holes(synth::tube_quads(profile, 60.0, 31, 32),
                                        std::vector<std::vector<Vec3>>{synth::wall_curve(profile, 30, 0.5, 4, 16)}, 5.0);
  FitConfig cfg;
  cfg.max_iters = 20;
  const auto r = fit_template(m, KdTree(synth::tube_surface(profile, 60, 61, 64).vertices), cfg);
  EXPECT_EQ(r.mesh.quads, m.quads);
  EXPECT_EQ(r.mesh.removed_quads, m.removed_quads);
  EXPECT_EQ(r.mesh.hole_loops, m.hole_loops);
}
