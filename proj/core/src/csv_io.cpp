#include "aortamesh/csv_io.hpp"

#include <charconv>
#include <sstream>

#include "aortamesh/error.hpp"
#include "aortamesh/file_util.hpp"

namespace aorta::io {

namespace {

std::string field(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string row_text(const std::string& id, const std::string& group, const analysis::StatRow& row, bool integer_count) {
  std::string line = id + "," + group;
  for (std::size_t c = 0; c < analysis::kStatColumns; ++c) {
    line += ',';
    if (c == 0 && integer_count && row[c]) {
      line += std::to_string(static_cast<std::size_t>(*row[c]));
    } else {
      line += field(row[c]);
    }
  }
  return line + "\n";
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string loss_history_csv(const fit::FitReport& report) {
  std::string out = "iteration,total,chamfer,area,flatness,angle,edge\n";
  for (std::size_t i = 0; i < report.loss_history.size(); ++i) {
    const auto& r = report.loss_history[i];
    out += std::to_string(i);
    for (double v : {r.total, r.chamfer, r.area, r.flatness, r.angle, r.edge}) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

void write_loss_history(const std::filesystem::path& path, const fit::FitReport& report) {
  write_file_atomic(path, loss_history_csv(report));
}

std::string stats_csv_header() {
  std::string h = "patient_id,group,n_elements,peak_kPa";
  for (auto r : analysis::kRegions) {
    const std::string n = analysis::to_string(r);
    h += "," + n + "_mean_kPa," + n + "_std_kPa," + n + "_peak_kPa";
  }
  return h + "\n";
}

std::string stats_csv(const std::vector<analysis::PatientRecord>& patients) {
  std::string out = stats_csv_header();
  for (const auto& p : patients) out += row_text(p.patient_id, p.group, analysis::to_row(p.stats), true);
  return out;
}

void write_stats_csv(const std::filesystem::path& path, const std::vector<analysis::PatientRecord>& patients) {
  write_file_atomic(path, stats_csv(patients));
}

std::string cohort_csv(const analysis::CohortSummary& summary) {
  std::string out = stats_csv(summary.patients);
  for (const auto& g : summary.groups) {
    out += row_text("GROUP:" + g.group + ":mean", g.group, g.mean, false);
    out += row_text("GROUP:" + g.group + ":std", g.group, g.stddev, false);
  }
  return out;
}

void write_cohort_csv(const std::filesystem::path& path, const analysis::CohortSummary& summary) {
  write_file_atomic(path, cohort_csv(summary));
}

std::vector<analysis::PatientRecord> read_stats_csv(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 1;
  const auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line_no) + ": " + msg);
  };
  if (!std::getline(in, line) || line + "\n" != stats_csv_header()) fail("unexpected stats header");
  std::vector<analysis::PatientRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cols = split(line);
    if (cols.size() != 2 + analysis::kStatColumns) fail("expected " + std::to_string(2 + analysis::kStatColumns) + " fields");
    if (cols[0].rfind("GROUP:", 0) == 0) continue;
    analysis::StatRow row;
    for (std::size_t c = 0; c < analysis::kStatColumns; ++c) {
      const std::string& s = cols[2 + c];
      if (s.empty()) continue;
      double v = 0.0;
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) fail("malformed number '" + s + "'");
      row[c] = v;
    }
    if (!row[0] || !row[1]) fail("n_elements and peak_kPa are required");
    analysis::PatientRecord rec;
    rec.patient_id = cols[0];
    rec.group = cols[1];
    rec.stats.n_elements = static_cast<std::size_t>(*row[0]);
    rec.stats.peak = *row[1];
    for (std::size_t r = 0; r < 4; ++r) {
      auto& reg = rec.stats.regions[r];
      reg.mean = row[2 + 3 * r];
      reg.stddev = row[3 + 3 * r];
      reg.peak = row[4 + 3 * r];
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string hex_quality_csv(const solid::HexQualityReport& report) {
  std::string out = "element,min_scaled_jacobian\n";
  for (std::size_t e = 0; e < report.scaled_jacobian.size(); ++e) {
    out += std::to_string(e) + "," + format_double(report.scaled_jacobian[e]) + "\n";
  }
  return out;
}

void write_hex_quality_csv(const std::filesystem::path& path, const solid::HexQualityReport& report) {
  write_file_atomic(path, hex_quality_csv(report));
}

}  // namespace aorta::io
