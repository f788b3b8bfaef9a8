#include "aortamesh/config.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <set>

#include "aortamesh/error.hpp"
#include "aortamesh/file_util.hpp"

namespace aorta::io {

namespace {

using nlohmann::json;

class Section {
 public:
  Section(const json& j, std::string path, const std::string& source)
      : j_(j), path_(std::move(path)), source_(source) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw Error(ErrorKind::Parse, source_ + ": field '" + qualified(key) + "': " + what);
  }

  std::string qualified(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) fail(k, "unknown key");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  void number(const char* key, double& out) const {
    if (!has(key)) return;
    if (!j_.at(key).is_number()) fail(key, "expected a number");
    out = j_.at(key).get<double>();
  }

  template <typename Int>
  void count(const char* key, Int& out) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "expected a non-negative integer");
    out = static_cast<Int>(v.get<unsigned long long>());
  }

  void text(const char* key, std::string& out) const {
    if (!has(key)) return;
    if (!j_.at(key).is_string()) fail(key, "expected a string");
    out = j_.at(key).get<std::string>();
  }

  void path(const char* key, std::filesystem::path& out, const std::filesystem::path& base) const {
    std::string s;
    text(key, s);
    if (s.empty()) return;
    std::filesystem::path p(s);
    out = p.is_absolute() || base.empty() ? p : base / p;
  }

  std::optional<Section> sub(const char* key) const {
    if (!has(key)) return std::nullopt;
    return Section(j_.at(key), qualified(key), source_);
  }

  const json& raw(const char* key) const { return j_.at(key); }

 private:
  const json& j_;
  std::string path_;
  const std::string& source_;
};

void apply_override(json& doc, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(ErrorKind::InvalidArgument, "override '" + spec + "' is not of the form key=value");
  }
  const std::string key = spec.substr(0, eq);
  const std::string value = spec.substr(eq + 1);
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw Error(ErrorKind::InvalidArgument, "override key '" + key + "' has an empty component");
    if (!node->is_object()) *node = json::object();
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  json parsed = json::parse(value, nullptr, false);
  *node = parsed.is_discarded() ? json(value) : parsed;
}

}  // namespace

void validate(const PipelineConfig& c) {
  const auto bad = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
  if (c.patient_id.empty() || c.patient_id.find_first_of(",\n\r") != std::string::npos) {
    bad("patient_id must be non-empty and free of commas and newlines");
  }
  if (std::find(analysis::kGroups.begin(), analysis::kGroups.end(), c.group) == analysis::kGroups.end()) {
    throw Error(ErrorKind::InvalidGroup, "group must be 'control' or 'aneurysm', got '" + c.group + "'");
  }
  if (!(c.iso > 0.0 && c.iso < 1.0)) bad("ingest.iso must lie in (0, 1)");
  if (c.templ.n_sections < 8) bad("template.n_sections must be >= 8");
  if (c.templ.n_ring < 3) bad("template.n_ring must be >= 3");
  if (!(c.templ.max_plane_distance > 0.0)) bad("template.max_plane_distance must be > 0");
  fit::validate(c.fit);
  if (!(c.thickness > 0.0) || !std::isfinite(c.thickness)) bad("solid.thickness must be > 0");
  if (c.layers < 1) bad("solid.layers must be >= 1");
  fea::validate(c.material);
  if (!std::isfinite(c.pressure)) bad("simulation.pressure must be finite");
  if (!(c.tolerance > 0.0 && c.tolerance < 1.0)) bad("simulation.tolerance must lie in (0, 1)");
  if (c.breakpoints) analysis::validate_breakpoints(*c.breakpoints, c.templ.n_sections);
}

PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir,
                            std::span<const std::string> overrides, const std::string& source) {
  json doc;
  if (json_text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::Parse, source + ": byte " + std::to_string(e.byte) + ": " + e.what());
    }
  }
  for (const auto& o : overrides) apply_override(doc, o);

  PipelineConfig c;
  const Section root(doc, "", source);
  root.allow({"patient_id", "group", "out_dir", "inputs", "ingest", "template", "fit", "solid", "material",
              "simulation", "regions"});
  root.text("patient_id", c.patient_id);
  root.text("group", c.group);
  {
    std::string out;
    root.text("out_dir", out);
    if (!out.empty()) c.out_dir = out;
  }
  if (auto s = root.sub("inputs")) {
    s->allow({"surface", "mask", "landmarks"});
    s->path("surface", c.inputs.surface, base_dir);
    s->path("mask", c.inputs.mask, base_dir);
    s->path("landmarks", c.inputs.landmarks, base_dir);
  }
  if (auto s = root.sub("ingest")) {
    s->allow({"iso", "smoothing_iterations"});
    s->number("iso", c.iso);
    s->count("smoothing_iterations", c.iso_smoothing);
  }
  if (auto s = root.sub("template")) {
    s->allow({"n_sections", "n_ring", "max_plane_distance"});
    s->count("n_sections", c.templ.n_sections);
    s->count("n_ring", c.templ.n_ring);
    s->number("max_plane_distance", c.templ.max_plane_distance);
  }
  if (auto s = root.sub("fit")) {
    s->allow({"max_iters", "step_size", "stop_rel_change", "stop_window", "target_chamfer_rms", "sample_count",
              "seed", "smoothing_lambda", "weights"});
    s->count("max_iters", c.fit.max_iters);
    s->number("step_size", c.fit.step_size);
    s->number("stop_rel_change", c.fit.stop_rel_change);
    s->count("stop_window", c.fit.stop_window);
    s->number("target_chamfer_rms", c.fit.target_chamfer_rms);
    s->count("sample_count", c.fit.sample_count);
    s->count("seed", c.fit.seed);
    s->number("smoothing_lambda", c.fit.smoothing_lambda);
    if (auto w = s->sub("weights")) {
      w->allow({"chamfer", "area", "flatness", "angle", "edge"});
      w->number("chamfer", c.fit.weights.chamfer);
      w->number("area", c.fit.weights.area);
      w->number("flatness", c.fit.weights.flatness);
      w->number("angle", c.fit.weights.angle);
      w->number("edge", c.fit.weights.edge);
    }
  }
  if (auto s = root.sub("solid")) {
    s->allow({"thickness", "layers"});
    s->number("thickness", c.thickness);
    s->count("layers", c.layers);
  }
  if (auto s = root.sub("material")) {
    s->allow({"youngs_modulus", "poisson_ratio"});
    s->number("youngs_modulus", c.material.youngs_modulus);
    s->number("poisson_ratio", c.material.poisson_ratio);
  }
  if (auto s = root.sub("simulation")) {
    s->allow({"pressure", "tolerance", "fixed_sets"});
    s->number("pressure", c.pressure);
    s->number("tolerance", c.tolerance);
    if (s->has("fixed_sets")) {
      const auto& a = s->raw("fixed_sets");
      if (!a.is_array()) s->fail("fixed_sets", "expected an array of set names");
      c.bcs.fixed_node_sets.clear();
      for (const auto& v : a) {
        if (!v.is_string()) s->fail("fixed_sets", "expected an array of set names");
        c.bcs.fixed_node_sets.push_back(v.get<std::string>());
      }
    }
  }
  if (auto s = root.sub("regions")) {
    s->allow({"breakpoints"});
    if (s->has("breakpoints")) {
      const auto& a = s->raw("breakpoints");
      if (!a.is_array() || a.size() != 3) s->fail("breakpoints", "expected 3 indices");
      analysis::Breakpoints b;
      for (std::size_t k = 0; k < 3; ++k) {
        if (!a[k].is_number_integer() || a[k].get<long long>() < 0) s->fail("breakpoints", "expected 3 indices");
        b[k] = a[k].get<std::size_t>();
      }
      c.breakpoints = b;
    }
  }
  validate(c);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path, std::span<const std::string> overrides) {
  if (path.empty()) return parse_config("", std::filesystem::current_path(), overrides, "<defaults>");
  return parse_config(read_file(path), path.parent_path(), overrides, path.string());
}

std::string config_to_json(const PipelineConfig& c) {
  json j;
  j["patient_id"] = c.patient_id;
  j["group"] = c.group;
  j["out_dir"] = c.out_dir.string();
  j["inputs"] = {{"surface", c.inputs.surface.string()},
                 {"mask", c.inputs.mask.string()},
                 {"landmarks", c.inputs.landmarks.string()}};
  j["ingest"] = {{"iso", c.iso}, {"smoothing_iterations", c.iso_smoothing}};
  j["template"] = {{"n_sections", c.templ.n_sections},
                   {"n_ring", c.templ.n_ring},
                   {"max_plane_distance", c.templ.max_plane_distance}};
  const auto& f = c.fit;
  j["fit"] = {{"max_iters", f.max_iters},
              {"step_size", f.step_size},
              {"stop_rel_change", f.stop_rel_change},
              {"stop_window", f.stop_window},
              {"target_chamfer_rms", f.target_chamfer_rms},
              {"sample_count", f.sample_count},
              {"seed", f.seed},
              {"smoothing_lambda", f.smoothing_lambda},
              {"weights",
               {{"chamfer", f.weights.chamfer},
                {"area", f.weights.area},
                {"flatness", f.weights.flatness},
                {"angle", f.weights.angle},
                {"edge", f.weights.edge}}}};
  j["solid"] = {{"thickness", c.thickness}, {"layers", c.layers}};
  j["material"] = {{"youngs_modulus", c.material.youngs_modulus}, {"poisson_ratio", c.material.poisson_ratio}};
  j["simulation"] = {{"pressure", c.pressure}, {"tolerance", c.tolerance}, {"fixed_sets", c.bcs.fixed_node_sets}};
  if (c.breakpoints) j["regions"]["breakpoints"] = *c.breakpoints;
  return j.dump(2) + "\n";
}

}  // namespace aorta::io
