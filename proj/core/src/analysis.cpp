#include "aortamesh/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aortamesh/error.hpp"
#include "aortamesh/spatial_index.hpp"

namespace aorta::analysis {

const char* to_string(Region r) {
  switch (r) {
    case Region::Root: return "root";
    case Region::Ascending: return "ascending";
    case Region::Arch: return "arch";
    case Region::Descending: return "descending";
  }
  return "unknown";
}

void validate_breakpoints(const Breakpoints& b, std::size_t n) {
  if (n < 4 || !(b[0] >= 1 && b[0] < b[1] && b[1] < b[2] && b[2] <= n - 2)) {
    throw Error(ErrorKind::InvalidBreakpoints,
                "breakpoints (" + std::to_string(b[0]) + ", " + std::to_string(b[1]) + ", " + std::to_string(b[2]) +
                    ") must be strictly increasing within [1, " + std::to_string(n >= 2 ? n - 2 : 0) + "]");
  }
}

RegionPartition assign_regions(const solid::HexMesh& mesh, std::span<const Vec3> centerline, const Breakpoints& b) {
  validate_breakpoints(b, centerline.size());
  const KdTree index(std::vector<Vec3>(centerline.begin(), centerline.end()));
  RegionPartition part;
  part.breakpoints = b;
  part.labels.resize(mesh.hexes.size());
  part.nearest_index.resize(mesh.hexes.size());
  for (std::size_t e = 0; e < mesh.hexes.size(); ++e) {
    Vec3 c;
    for (auto n : mesh.hexes[e]) c += mesh.nodes[n];
    const std::size_t idx = index.nearest(c * 0.125).index;
    part.nearest_index[e] = idx;
    part.labels[e] = idx < b[0] ? Region::Root : idx < b[1] ? Region::Ascending : idx < b[2] ? Region::Arch : Region::Descending;
  }
  return part;
}

Breakpoints default_breakpoints(const LandmarkSet& landmarks, std::span<const Vec3> centerline) {
  const std::size_t n = centerline.size();
  if (n < 8) throw Error(ErrorKind::InvalidBreakpoints, "centerline too short for default regions");
  const auto frac = [n](double f) { return static_cast<std::size_t>(std::lround(f * static_cast<double>(n))); };
  std::size_t root = std::max<std::size_t>(1, frac(0.1));
  std::size_t lo = frac(0.4);
  std::size_t hi = frac(0.6);
  if (!landmarks.arch_curves.empty()) {
    const KdTree index(std::vector<Vec3>(centerline.begin(), centerline.end()));
    std::size_t mn = n;
    std::size_t mx = 0;
    for (const auto& curve : landmarks.arch_curves) {
      const std::size_t idx = index.nearest(centroid(curve)).index;
      mn = std::min(mn, idx);
      mx = std::max(mx, idx);
    }
    lo = mn >= 5 ? mn - 5 : 0;
    hi = mx + 5 + 1;
  }
  // Keep the three boundaries strictly increasing inside [1, n - 2].
  hi = std::clamp<std::size_t>(hi, 3, n - 2);
  lo = std::clamp<std::size_t>(lo, 2, hi - 1);
  root = std::clamp<std::size_t>(root, 1, lo - 1);
  return {root, lo, hi};
}

StressStats region_stats(std::span<const double> values, const RegionPartition& partition) {
  if (values.size() != partition.labels.size()) {
    throw Error(ErrorKind::InvalidArgument, "stress and region label counts differ");
  }
  StressStats s;
  s.n_elements = values.size();
  std::array<double, 4> sum{};
  std::array<double, 4> peak{};
  for (std::size_t e = 0; e < values.size(); ++e) {
    const auto r = static_cast<std::size_t>(partition.labels[e]);
    sum[r] += values[e];
    peak[r] = s.regions[r].count == 0 ? values[e] : std::max(peak[r], values[e]);
    ++s.regions[r].count;
    s.peak = e == 0 ? values[e] : std::max(s.peak, values[e]);
  }
  std::array<double, 4> sq{};
  for (std::size_t e = 0; e < values.size(); ++e) {
    const auto r = static_cast<std::size_t>(partition.labels[e]);
    const double d = values[e] - sum[r] / static_cast<double>(s.regions[r].count);
    sq[r] += d * d;
  }
  for (std::size_t r = 0; r < 4; ++r) {
    auto& reg = s.regions[r];
    if (reg.count == 0) continue;
    const double cnt = static_cast<double>(reg.count);
    reg.mean = sum[r] / cnt;
    reg.stddev = std::sqrt(sq[r] / cnt);
    reg.peak = peak[r];
  }
  return s;
}

StatRow to_row(const StressStats& s) {
  StatRow row;
  row[0] = static_cast<double>(s.n_elements);
  row[1] = s.peak;
  for (std::size_t r = 0; r < 4; ++r) {
    row[2 + 3 * r] = s.regions[r].mean;
    row[3 + 3 * r] = s.regions[r].stddev;
    row[4 + 3 * r] = s.regions[r].peak;
  }
  return row;
}

CohortSummary cohort_table(std::span<const PatientRecord> patients) {
  CohortSummary out;
  out.patients.assign(patients.begin(), patients.end());
  for (const auto& p : patients) {
    if (std::find(kGroups.begin(), kGroups.end(), p.group) == kGroups.end()) {
      throw Error(ErrorKind::InvalidGroup, "unknown group '" + p.group + "' for patient " + p.patient_id);
    }
  }
  for (const char* group : kGroups) {
    std::vector<StatRow> rows;
    for (const auto& p : patients)
      if (p.group == group) rows.push_back(to_row(p.stats));
    if (rows.empty()) continue;
    GroupSummary g;
    g.group = group;
    g.n_patients = rows.size();
    for (std::size_t c = 0; c < kStatColumns; ++c) {
      double sum = 0.0;
      std::size_t cnt = 0;
      for (const auto& r : rows)
        if (r[c]) {
          sum += *r[c];
          ++cnt;
        }
      if (cnt == 0) continue;
      const double mean = sum / static_cast<double>(cnt);
      double sq = 0.0;
      for (const auto& r : rows)
        if (r[c]) sq += (*r[c] - mean) * (*r[c] - mean);
      g.mean[c] = mean;
      g.stddev[c] = std::sqrt(sq / static_cast<double>(cnt));
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

}  // namespace aorta::analysis
