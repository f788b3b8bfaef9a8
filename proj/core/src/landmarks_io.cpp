#include "aortamesh/landmarks_io.hpp"

#include <nlohmann/json.hpp>

#include "aortamesh/error.hpp"
#include "aortamesh/file_util.hpp"

namespace aorta::io {

namespace {

using nlohmann::json;

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw Error(ErrorKind::Parse, source_ + ": field '" + field + "': " + what);
  }

  const json& require(const json& obj, const std::string& key, const std::string& field) const {
    if (!obj.is_object() || !obj.contains(key)) fail(field, "missing");
    return obj.at(key);
  }

  Vec3 point(const json& j, const std::string& field) const {
    if (!j.is_array() || j.size() != 3) fail(field, "expected [x, y, z]");
    Vec3 p;
    for (int a = 0; a < 3; ++a) {
      if (!j[a].is_number()) fail(field, "coordinate is not a number");
      p[a] = j[a].get<double>();
    }
    return p;
  }

  std::vector<Vec3> points(const json& j, const std::string& field) const {
    if (!j.is_array()) fail(field, "expected an array of points");
    std::vector<Vec3> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }

 private:
  std::string source_;
};

json to_json(const Vec3& p) { return json::array({p.x, p.y, p.z}); }

json to_json(const std::vector<Vec3>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(to_json(p));
  return a;
}

}  // namespace

LandmarkSet parse_landmarks(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, source + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
  const Reader r(source);
  if (!doc.is_object()) r.fail("<root>", "expected an object");

  LandmarkSet lm;
  const auto hinge = r.points(r.require(doc, "hinge_points", "hinge_points"), "hinge_points");
  if (hinge.size() != 3) r.fail("hinge_points", "expected exactly 3 points");
  std::copy(hinge.begin(), hinge.end(), lm.hinge_points.begin());
  lm.end_curve = r.points(r.require(doc, "end_curve", "end_curve"), "end_curve");

  const json& arches = r.require(doc, "arch_curves", "arch_curves");
  if (!arches.is_array()) r.fail("arch_curves", "expected an array of curves");
  for (std::size_t c = 0; c < arches.size(); ++c) {
    lm.arch_curves.push_back(r.points(arches[c], "arch_curves[" + std::to_string(c) + "]"));
  }

  const json& cl = r.require(doc, "centerline", "centerline");
  lm.centerline_points = r.points(r.require(cl, "points", "centerline.points"), "centerline.points");
  if (cl.contains("radii") && !cl["radii"].is_null()) {
    const json& radii = cl["radii"];
    if (!radii.is_array()) r.fail("centerline.radii", "expected an array of numbers");
    std::vector<double> rv;
    for (const auto& v : radii) {
      if (!v.is_number()) r.fail("centerline.radii", "radius is not a number");
      rv.push_back(v.get<double>());
    }
    lm.centerline_radii = std::move(rv);
  }

  if (doc.contains("region_breakpoints") && !doc["region_breakpoints"].is_null()) {
    const json& b = doc["region_breakpoints"];
    if (!b.is_array() || b.size() != 3) r.fail("region_breakpoints", "expected 3 indices");
    std::array<std::size_t, 3> bp;
    for (int k = 0; k < 3; ++k) {
      if (!b[k].is_number_integer() || b[k].get<long>() < 0) r.fail("region_breakpoints", "indices must be non-negative integers");
      bp[k] = b[k].get<std::size_t>();
    }
    lm.region_breakpoints = bp;
  }
  validate(lm);
  return lm;
}

LandmarkSet read_landmarks(const std::filesystem::path& path) { return parse_landmarks(read_file(path), path.string()); }

std::string landmarks_to_json(const LandmarkSet& lm) {
  json doc;
  doc["hinge_points"] = to_json(std::vector<Vec3>(lm.hinge_points.begin(), lm.hinge_points.end()));
  doc["end_curve"] = to_json(lm.end_curve);
  doc["arch_curves"] = json::array();
  for (const auto& c : lm.arch_curves) doc["arch_curves"].push_back(to_json(c));
  doc["centerline"]["points"] = to_json(lm.centerline_points);
  if (lm.centerline_radii) doc["centerline"]["radii"] = *lm.centerline_radii;
  if (lm.region_breakpoints) doc["region_breakpoints"] = *lm.region_breakpoints;
  return doc.dump(2) + "\n";
}

void write_landmarks(const std::filesystem::path& path, const LandmarkSet& landmarks) {
  write_file_atomic(path, landmarks_to_json(landmarks));
}

}  // namespace aorta::io
