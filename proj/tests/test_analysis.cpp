#include <gtest/gtest.h>

#include <numeric>

#include "aortamesh/analysis.hpp"
#include "fea_fixtures.hpp"
#include "test_support.hpp"

using namespace aorta;
using namespace aorta::analysis;

namespace {

std::vector<Vec3> z_centerline(std::size_t n, double length) {
  std::vector<Vec3> c;
  for (std::size_t i = 0; i < n; ++i) c.push_back({0, 0, length * double(i) / double(n - 1)});
  return c;
}

RegionPartition manual_partition(std::vector<Region> labels) {
  RegionPartition p;
  p.labels = std::move(labels);
  p.nearest_index.assign(p.labels.size(), 0);
  return p;
}

// Naive two-pass statistics used as the reference.
struct Naive {
  double mean, stddev, peak;
};

Naive naive(const std::vector<double>& v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / double(v.size())), *std::max_element(v.begin(), v.end())};
}

}  // namespace

TEST(Breakpoints, Validation) {
  EXPECT_NO_THROW(validate_breakpoints({1, 2, 3}, 5));
  EXPECT_AORTA_ERROR(validate_breakpoints({0, 2, 3}, 5), ErrorKind::InvalidBreakpoints);
  EXPECT_AORTA_ERROR(validate_breakpoints({1, 1, 3}, 5), ErrorKind::InvalidBreakpoints);
  EXPECT_AORTA_ERROR(validate_breakpoints({1, 2, 4}, 5), ErrorKind::InvalidBreakpoints);
  EXPECT_AORTA_ERROR(validate_breakpoints({3, 2, 1}, 100), ErrorKind::InvalidBreakpoints);
}

TEST(Regions, LabelsFollowNearestCenterlineIndex) {
  const double len = 100.0;
  const auto mesh = testing_support::cylinder_hex(10, 2, len, 41, 12, 2);
  const auto cl = z_centerline(101, len);
  const Breakpoints b{10, 40, 60};
  const auto part = assign_regions(mesh, cl, b);
  ASSERT_EQ(part.labels.size(), mesh.hexes.size());
  for (std::size_t e = 0; e < mesh.hexes.size(); ++e) {
    const double z = testing_support::element_centroid(mesh, e).z;
    const auto idx = static_cast<std::size_t>(std::lround(z));
    EXPECT_EQ(part.nearest_index[e], idx);
    const Region want = idx < 10 ? Region::Root : idx < 40 ? Region::Ascending : idx < 60 ? Region::Arch : Region::Descending;
    EXPECT_EQ(part.labels[e], want);
  }
  std::array<std::size_t, 4> counts{};
  for (auto r : part.labels) ++counts[static_cast<std::size_t>(r)];
  for (auto c : counts) EXPECT_GT(c, 0u);
}

TEST(Regions, InvalidBreakpointsRejected) {
  const auto mesh = testing_support::cylinder_hex(10, 2, 20, 5, 8, 1);
  EXPECT_AORTA_ERROR(assign_regions(mesh, z_centerline(20, 20), {5, 5, 8}), ErrorKind::InvalidBreakpoints);
}

TEST(Regions, DefaultBreakpointsWithoutArchCurves) {
  LandmarkSet lm;
  const auto cl = z_centerline(100, 100);
  const auto b = default_breakpoints(lm, cl);
  EXPECT_EQ(b, (Breakpoints{10, 40, 60}));
  EXPECT_NO_THROW(validate_breakpoints(b, cl.size()));
}

TEST(Regions, DefaultBreakpointsFromArchCurves) {
  LandmarkSet lm;
  const auto cl = z_centerline(100, 99);
  std::vector<Vec3> a, c;
  for (int k = 0; k < 8; ++k) {
    const double t = k * std::numbers::pi / 4;
    a.push_back({5 * std::cos(t), 5 * std::sin(t), 30});
    c.push_back({5 * std::cos(t), 5 * std::sin(t), 70});
  }
  lm.arch_curves = {a, c};
  EXPECT_EQ(default_breakpoints(lm, cl), (Breakpoints{10, 25, 76}));
}

TEST(Regions, DefaultBreakpointsAlwaysValid) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 8 + rng() % 200;
    const auto cl = z_centerline(n, double(n));
    LandmarkSet lm;
    if (t % 2) lm.arch_curves = {{testing_support::random_vec(rng, -10, double(n) + 10)}};
    EXPECT_NO_THROW(validate_breakpoints(default_breakpoints(lm, cl), n)) << n;
  }
  EXPECT_AORTA_ERROR(default_breakpoints(LandmarkSet{}, z_centerline(5, 5)), ErrorKind::InvalidBreakpoints);
}

TEST(RegionStats, MatchesNaiveComputation) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 500.0);
  std::vector<Region> labels;
  std::vector<double> v;
  std::array<std::vector<double>, 4> per;
  for (int i = 0; i < 1000; ++i) {
    const auto r = kRegions[rng() % 4];
    labels.push_back(r);
    v.push_back(u(rng));
    per[static_cast<std::size_t>(r)].push_back(v.back());
  }
  const auto s = region_stats(v, manual_partition(labels));
  EXPECT_EQ(s.n_elements, 1000u);
  EXPECT_EQ(s.peak, *std::max_element(v.begin(), v.end()));
  for (std::size_t r = 0; r < 4; ++r) {
    const auto ref = naive(per[r]);
    EXPECT_EQ(s.regions[r].count, per[r].size());
    EXPECT_NEAR(*s.regions[r].mean, ref.mean, 1e-9 * ref.mean);
    EXPECT_NEAR(*s.regions[r].stddev, ref.stddev, 1e-9 * ref.mean);
    EXPECT_EQ(*s.regions[r].peak, ref.peak);
  }
}

TEST(RegionStats, EmptyRegionHasNoValues) {
  const auto s = region_stats(std::vector<double>{1.0, 3.0}, manual_partition({Region::Root, Region::Root}));
  EXPECT_DOUBLE_EQ(*s.regions[0].mean, 2.0);
  EXPECT_DOUBLE_EQ(*s.regions[0].stddev, 1.0);
  for (std::size_t r = 1; r < 4; ++r) {
    EXPECT_EQ(s.regions[r].count, 0u);
    EXPECT_FALSE(s.regions[r].mean);
    EXPECT_FALSE(s.regions[r].stddev);
    EXPECT_FALSE(s.regions[r].peak);
  }
  const auto row = to_row(s);
  EXPECT_EQ(*row[0], 2.0);
  EXPECT_EQ(*row[1], 3.0);
  EXPECT_FALSE(row[5]);
}

TEST(RegionStats, SizeMismatchThrows) {
  EXPECT_AORTA_ERROR(region_stats(std::vector<double>{1.0}, manual_partition({})), ErrorKind::InvalidArgument);
}

TEST(Cohort, GroupMeansAndDeviations) {
  std::vector<PatientRecord> patients;
  const std::array<double, 3> control_peaks{100, 200, 300};
  for (std::size_t i = 0; i < 3; ++i) {
    PatientRecord p{"c" + std::to_string(i), "control", {}};
    p.stats.n_elements = 10;
    p.stats.peak = control_peaks[i];
    p.stats.regions[0] = {5, control_peaks[i] / 2, 1.0, control_peaks[i]};
    patients.push_back(p);
  }
  PatientRecord a{"a0", "aneurysm", {}};
  a.stats.n_elements = 7;
  a.stats.peak = 42;
  patients.push_back(a);

  const auto t = cohort_table(patients);
  EXPECT_EQ(t.patients.size(), 4u);
  ASSERT_EQ(t.groups.size(), 2u);
  const auto& c = t.groups[0];
  EXPECT_EQ(c.group, "control");
  EXPECT_EQ(c.n_patients, 3u);
  EXPECT_DOUBLE_EQ(*c.mean[1], 200.0);
  EXPECT_NEAR(*c.stddev[1], std::sqrt(20000.0 / 3.0), 1e-9);
  EXPECT_DOUBLE_EQ(*c.mean[2], 100.0);
  EXPECT_DOUBLE_EQ(*c.stddev[0], 0.0);
  EXPECT_FALSE(c.mean[5]);
  EXPECT_EQ(t.groups[1].group, "aneurysm");
  EXPECT_EQ(t.groups[1].n_patients, 1u);
  EXPECT_DOUBLE_EQ(*t.groups[1].stddev[1], 0.0);
}

TEST(Cohort, EmptyGroupsOmittedAndBadTagsRejected) {
  std::vector<PatientRecord> patients{{"x", "aneurysm", {}}};
  const auto t = cohort_table(patients);
  ASSERT_EQ(t.groups.size(), 1u);
  EXPECT_EQ(t.groups[0].group, "aneurysm");
  EXPECT_TRUE(cohort_table({}).groups.empty());
  patients.push_back({"y", "healthy", {}});
  EXPECT_AORTA_ERROR(cohort_table(patients), ErrorKind::InvalidGroup);
}

TEST(Regions, Names) {
  EXPECT_STREQ(to_string(Region::Root), "root");
  EXPECT_STREQ(to_string(Region::Ascending), "ascending");
  EXPECT_STREQ(to_string(Region::Arch), "arch");
  EXPECT_STREQ(to_string(Region::Descending), "descending");
}
