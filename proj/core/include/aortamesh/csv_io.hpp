#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "aortamesh/analysis.hpp"
#include "aortamesh/fitting.hpp"
#include "aortamesh/solidify.hpp"

namespace aorta::io {

// Comma-separated, header row, LF line endings. Numbers use 17 significant
// digits; absent statistics are empty fields.

std::string loss_history_csv(const fit::FitReport& report);
void write_loss_history(const std::filesystem::path& path, const fit::FitReport& report);

/// patient_id, group, n_elements, peak_kPa, then mean/std/peak per region
/// (root, ascending, arch, descending).
std::string stats_csv_header();
std::string stats_csv(const std::vector<analysis::PatientRecord>& patients);
void write_stats_csv(const std::filesystem::path& path, const std::vector<analysis::PatientRecord>& patients);

/// Patient rows followed by "GROUP:<group>:mean" and "GROUP:<group>:std" rows.
std::string cohort_csv(const analysis::CohortSummary& summary);
void write_cohort_csv(const std::filesystem::path& path, const analysis::CohortSummary& summary);

/// Patient rows of a stats or cohort CSV; group summary rows are skipped.
/// Region element counts are not stored, so they read back as 0.
std::vector<analysis::PatientRecord> read_stats_csv(const std::filesystem::path& path);

std::string hex_quality_csv(const solid::HexQualityReport& report);
void write_hex_quality_csv(const std::filesystem::path& path, const solid::HexQualityReport& report);

}  // namespace aorta::io
