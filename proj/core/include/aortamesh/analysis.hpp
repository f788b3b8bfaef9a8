#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aortamesh/geometry.hpp"
#include "aortamesh/solidify.hpp"

namespace aorta::analysis {

enum class Region { Root = 0, Ascending = 1, Arch = 2, Descending = 3 };
inline constexpr std::array<Region, 4> kRegions{Region::Root, Region::Ascending, Region::Arch, Region::Descending};
const char* to_string(Region r);

using Breakpoints = std::array<std::size_t, 3>;

/// Element labels from the nearest centerline index of each element
/// centroid: root < b0 <= ascending < b1 <= arch < b2 <= descending.
struct RegionPartition {
  Breakpoints breakpoints{};
  std::vector<Region> labels;
  std::vector<std::size_t> nearest_index;
};

/// Throws Error(InvalidBreakpoints) unless 1 <= b0 < b1 < b2 <= n - 2.
void validate_breakpoints(const Breakpoints& b, std::size_t n_centerline);

RegionPartition assign_regions(const solid::HexMesh& mesh, std::span<const Vec3> centerline, const Breakpoints& b);

/// Breakpoints used when the landmarks carry none: root|ascending at 10% of
/// the centerline; the arch spans the centerline indices nearest to the
/// arch-curve centroids padded by 5; without arch curves the arch is the
/// 40%-60% band.
Breakpoints default_breakpoints(const LandmarkSet& landmarks, std::span<const Vec3> centerline);

struct RegionSummary {
  std::size_t count = 0;
  std::optional<double> mean;
  std::optional<double> stddev;  // population
  std::optional<double> peak;
};

struct StressStats {
  std::size_t n_elements = 0;
  double peak = 0.0;
  std::array<RegionSummary, 4> regions;
};

StressStats region_stats(std::span<const double> max_abs_principal, const RegionPartition& partition);

inline constexpr std::array<const char*, 2> kGroups{"control", "aneurysm"};

struct PatientRecord {
  std::string patient_id;
  std::string group;
  StressStats stats;
};

/// Column-wise statistic over one group's patients. Columns follow the CSV
/// layout: n_elements, peak, then (mean, std, peak) per region.
inline constexpr std::size_t kStatColumns = 14;
using StatRow = std::array<std::optional<double>, kStatColumns>;

StatRow to_row(const StressStats& s);

struct GroupSummary {
  std::string group;
  std::size_t n_patients = 0;
  StatRow mean;
  StatRow stddev;  // population
};

struct CohortSummary {
  std::vector<PatientRecord> patients;
  std::vector<GroupSummary> groups;  // in kGroups order, groups without patients omitted
};

/// Throws Error(InvalidGroup) for tags outside kGroups.
CohortSummary cohort_table(std::span<const PatientRecord> patients);

}  // namespace aorta::analysis
