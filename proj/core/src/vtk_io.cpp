#include "aortamesh/vtk_io.hpp"

#include <charconv>
#include <string_view>

#include "aortamesh/error.hpp"
#include "aortamesh/file_util.hpp"

namespace aorta::io {

namespace {

constexpr std::string_view kNodeSetPrefix = "nodeset_";
constexpr std::string_view kFaceSetPrefix = "faceset_";

// ---- writing ---------------------------------------------------------------

class Writer {
 public:
  void line(std::string_view s) {
    out_ += s;
    out_ += '\n';
  }
  void num(double v) { word(format_double(v)); }
  void num(std::size_t v) { word(std::to_string(v)); }
  void word(const std::string& w) {
    if (!at_line_start_) out_ += ' ';
    out_ += w;
    at_line_start_ = false;
  }
  void end_line() {
    out_ += '\n';
    at_line_start_ = true;
  }
  void vec(const Vec3& p) {
    num(p.x);
    num(p.y);
    num(p.z);
    end_line();
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
  bool at_line_start_ = true;
};

void header(Writer& w, const char* title, const char* dataset) {
  w.line("# vtk DataFile Version 3.0");
  w.line(title);
  w.line("ASCII");
  w.line(std::string("DATASET ") + dataset);
}

void int_array(Writer& w, const std::string& name, std::size_t comps, const std::vector<std::size_t>& flat) {
  w.line(name + " " + std::to_string(comps) + " " + std::to_string(flat.size() / comps) + " int");
  for (std::size_t i = 0; i < flat.size(); ++i) {
    w.num(flat[i]);
    if ((i + 1) % comps == 0) w.end_line();
  }
}

void vec_array(Writer& w, const std::string& name, const std::vector<Vec3>& pts) {
  w.line(name + " 3 " + std::to_string(pts.size()) + " double");
  for (const auto& p : pts) w.vec(p);
}

void points(Writer& w, const std::vector<Vec3>& pts) {
  w.line("POINTS " + std::to_string(pts.size()) + " double");
  for (const auto& p : pts) w.vec(p);
}

// ---- reading ---------------------------------------------------------------

class Tokens {
 public:
  Tokens(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Parse, source_ + ":" + std::to_string(line_) + ": " + msg);
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  std::string_view next() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of file");
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return std::string_view(text_).substr(start, pos_ - start);
  }

  std::string_view peek() {
    const std::size_t save_pos = pos_;
    const std::size_t save_line = line_;
    auto t = next();
    pos_ = save_pos;
    line_ = save_line;
    return t;
  }

  std::string rest_of_line() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    std::string s(text_.substr(start, pos_ - start));
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
  }

  void newline() {
    if (pos_ >= text_.size() || text_[pos_] != '\n') fail("expected end of line");
    ++pos_;
    ++line_;
  }

  void expect(std::string_view kw) {
    const auto t = next();
    if (t != kw) fail("expected '" + std::string(kw) + "', found '" + std::string(t) + "'");
  }

  std::size_t index() {
    const auto t = next();
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail("expected a non-negative integer, found '" + std::string(t) + "'");
    return v;
  }

  double number() {
    const auto t = next();
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail("expected a number, found '" + std::string(t) + "'");
    return v;
  }

  Vec3 vec() {
    Vec3 p;
    p.x = number();
    p.y = number();
    p.z = number();
    return p;
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  const std::string& text_;
  std::string source_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

void read_header(Tokens& t, std::string_view dataset) {
  t.expect("#");
  t.expect("vtk");
  t.rest_of_line();
  t.newline();
  t.rest_of_line();  // title
  t.expect("ASCII");
  t.expect("DATASET");
  const auto ds = t.next();
  if (ds != dataset) t.fail("expected DATASET " + std::string(dataset) + ", found " + std::string(ds));
}

struct FieldArray {
  std::string name;
  std::size_t comps = 0;
  std::size_t tuples = 0;
  std::vector<double> values;
};

std::vector<FieldArray> read_field(Tokens& t) {
  std::vector<FieldArray> arrays;
  if (t.peek() != "FIELD") return arrays;
  t.next();
  t.next();  // field name
  const std::size_t n = t.index();
  for (std::size_t a = 0; a < n; ++a) {
    FieldArray f;
    f.name = std::string(t.next());
    f.comps = t.index();
    f.tuples = t.index();
    t.next();  // data type
    f.values.resize(f.comps * f.tuples);
    for (auto& v : f.values) v = t.number();
    arrays.push_back(std::move(f));
  }
  return arrays;
}

std::vector<std::size_t> as_indices(const FieldArray& f, Tokens& t) {
  std::vector<std::size_t> out;
  out.reserve(f.values.size());
  for (double v : f.values) {
    if (v < 0 || v != double(std::size_t(v))) t.fail("field '" + f.name + "' holds a non-index value");
    out.push_back(std::size_t(v));
  }
  return out;
}

std::vector<Vec3> as_points(const FieldArray& f, Tokens& t) {
  if (f.comps != 3) t.fail("field '" + f.name + "' must have 3 components");
  std::vector<Vec3> out(f.tuples);
  for (std::size_t i = 0; i < f.tuples; ++i) out[i] = {f.values[3 * i], f.values[3 * i + 1], f.values[3 * i + 2]};
  return out;
}

std::vector<Vec3> read_points(Tokens& t) {
  t.expect("POINTS");
  const std::size_t n = t.index();
  t.next();  // data type
  std::vector<Vec3> pts(n);
  for (auto& p : pts) p = t.vec();
  return pts;
}

}  // namespace

std::string quad_vtk_text(const QuadDocument& doc) {
  const auto& m = doc.mesh;
  Writer w;
  header(w, "aortamesh quad surface", "POLYDATA");
  std::size_t n_arrays = 1 + (m.removed_quads.empty() ? 0 : 1) + m.hole_loops.size() + (doc.centerline.empty() ? 0 : 1);
  w.line("FIELD FieldData " + std::to_string(n_arrays));
  int_array(w, "grid_dims", 2, {m.n_sections, m.n_ring});
  if (!m.removed_quads.empty()) {
    std::vector<std::size_t> flat;
    for (const auto& g : m.removed_quads) {
      flat.push_back(g.section);
      flat.push_back(g.ring);
    }
    int_array(w, "removed_quads", 2, flat);
  }
  for (std::size_t h = 0; h < m.hole_loops.size(); ++h) int_array(w, "hole_loop_" + std::to_string(h), 1, m.hole_loops[h]);
  if (!doc.centerline.empty()) vec_array(w, "centerline", doc.centerline);
  points(w, m.vertices);
  w.line("POLYGONS " + std::to_string(m.quads.size()) + " " + std::to_string(5 * m.quads.size()));
  for (const auto& q : m.quads) {
    w.num(std::size_t(4));
    for (auto v : q) w.num(v);
    w.end_line();
  }
  return w.take();
}

void write_quad_vtk(const std::filesystem::path& path, const QuadDocument& doc) {
  write_file_atomic(path, quad_vtk_text(doc));
}

QuadDocument parse_quad_vtk(const std::string& text, const std::string& source) {
  Tokens t(text, source);
  read_header(t, "POLYDATA");
  QuadDocument doc;
  auto& m = doc.mesh;
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> loops;
  for (const auto& f : read_field(t)) {
    if (f.name == "grid_dims") {
      const auto d = as_indices(f, t);
      if (d.size() != 2) t.fail("grid_dims needs 2 values");
      m.n_sections = d[0];
      m.n_ring = d[1];
    } else if (f.name == "removed_quads") {
      const auto d = as_indices(f, t);
      for (std::size_t i = 0; i + 1 < d.size(); i += 2) m.removed_quads.push_back({d[i], d[i + 1]});
    } else if (f.name.rfind("hole_loop_", 0) == 0) {
      m.hole_loops.push_back(as_indices(f, t));
    } else if (f.name == "centerline") {
      doc.centerline = as_points(f, t);
    }
  }
  m.vertices = read_points(t);
  t.expect("POLYGONS");
  const std::size_t n = t.index();
  t.index();
  m.quads.resize(n);
  for (std::size_t q = 0; q < n; ++q) {
    if (t.index() != 4) t.fail("polygon " + std::to_string(q) + " is not a quad");
    for (auto& v : m.quads[q]) {
      v = t.index();
      if (v >= m.vertices.size()) t.fail("polygon " + std::to_string(q) + " references a missing point");
    }
  }
  if (!t.at_end()) t.fail("trailing data after POLYGONS");
  return doc;
}

QuadDocument read_quad_vtk(const std::filesystem::path& path) { return parse_quad_vtk(read_file(path), path.string()); }

std::string hex_vtk_text(const HexDocument& doc) {
  const auto& m = doc.mesh;
  const auto& f = doc.fields;
  Writer w;
  header(w, "aortamesh hex wall", "UNSTRUCTURED_GRID");
  const std::size_t n_arrays = 3 + m.node_sets.size() + m.face_sets.size() + (doc.centerline.empty() ? 0 : 1);
  w.line("FIELD FieldData " + std::to_string(n_arrays));
  int_array(w, "layers", 1, {m.layers});
  w.line("thickness 1 1 double");
  w.num(m.thickness);
  w.end_line();
  int_array(w, "surface_vertices", 1, m.surface_vertices);
  for (const auto& [name, ids] : m.node_sets) int_array(w, std::string(kNodeSetPrefix) + name, 1, ids);
  for (const auto& [name, faces] : m.face_sets) {
    std::vector<std::size_t> flat;
    flat.reserve(4 * faces.size());
    for (const auto& face : faces) flat.insert(flat.end(), face.begin(), face.end());
    int_array(w, std::string(kFaceSetPrefix) + name, 4, flat);
  }
  if (!doc.centerline.empty()) vec_array(w, "centerline", doc.centerline);
  points(w, m.nodes);
  w.line("CELLS " + std::to_string(m.hexes.size()) + " " + std::to_string(9 * m.hexes.size()));
  for (const auto& h : m.hexes) {
    w.num(std::size_t(8));
    for (auto v : h) w.num(v);
    w.end_line();
  }
  w.line("CELL_TYPES " + std::to_string(m.hexes.size()));
  for (std::size_t e = 0; e < m.hexes.size(); ++e) w.line("12");

  const auto scalars = [&](const char* name, const std::vector<double>& v) {
    w.line(std::string("SCALARS ") + name + " double 1");
    w.line("LOOKUP_TABLE default");
    for (double x : v) {
      w.num(x);
      w.end_line();
    }
  };
  if (!f.max_abs_principal.empty() || !f.stress.empty() || !f.scaled_jacobian.empty()) {
    w.line("CELL_DATA " + std::to_string(m.hexes.size()));
    if (!f.max_abs_principal.empty()) scalars("max_abs_principal_stress_kPa", f.max_abs_principal);
    if (!f.scaled_jacobian.empty()) scalars("min_scaled_jacobian", f.scaled_jacobian);
    if (!f.stress.empty()) {
      w.line("TENSORS stress_kPa double");
      for (const auto& s : f.stress) {
        for (const auto& row : s) {
          for (double x : row) w.num(x);
          w.end_line();
        }
      }
    }
  }
  if (!f.displacement.empty()) {
    w.line("POINT_DATA " + std::to_string(m.nodes.size()));
    w.line("VECTORS displacement_mm double");
    for (const auto& u : f.displacement) w.vec(u);
  }
  return w.take();
}

void write_hex_vtk(const std::filesystem::path& path, const HexDocument& doc) {
  write_file_atomic(path, hex_vtk_text(doc));
}

HexDocument parse_hex_vtk(const std::string& text, const std::string& source) {
  Tokens t(text, source);
  read_header(t, "UNSTRUCTURED_GRID");
  HexDocument doc;
  auto& m = doc.mesh;
  for (const auto& f : read_field(t)) {
    if (f.name == "layers") {
      m.layers = as_indices(f, t).at(0);
    } else if (f.name == "thickness") {
      if (f.values.empty()) t.fail("thickness is empty");
      m.thickness = f.values[0];
    } else if (f.name == "surface_vertices") {
      m.surface_vertices = as_indices(f, t);
    } else if (f.name.rfind(kNodeSetPrefix, 0) == 0) {
      m.node_sets[f.name.substr(kNodeSetPrefix.size())] = as_indices(f, t);
    } else if (f.name.rfind(kFaceSetPrefix, 0) == 0) {
      if (f.comps != 4) t.fail("face set '" + f.name + "' must have 4 components");
      const auto flat = as_indices(f, t);
      auto& faces = m.face_sets[f.name.substr(kFaceSetPrefix.size())];
      for (std::size_t i = 0; i + 3 < flat.size(); i += 4) faces.push_back({flat[i], flat[i + 1], flat[i + 2], flat[i + 3]});
    } else if (f.name == "centerline") {
      doc.centerline = as_points(f, t);
    }
  }
  m.nodes = read_points(t);
  t.expect("CELLS");
  const std::size_t n = t.index();
  t.index();
  m.hexes.resize(n);
  for (std::size_t e = 0; e < n; ++e) {
    if (t.index() != 8) t.fail("cell " + std::to_string(e) + " does not have 8 points");
    for (auto& v : m.hexes[e]) {
      v = t.index();
      if (v >= m.nodes.size()) t.fail("cell " + std::to_string(e) + " references a missing point");
    }
  }
  t.expect("CELL_TYPES");
  if (t.index() != n) t.fail("CELL_TYPES count differs from CELLS");
  for (std::size_t e = 0; e < n; ++e) {
    if (t.index() != 12) t.fail("cell " + std::to_string(e) + " is not a hexahedron (type 12)");
  }

  std::size_t attached = 0;  // element or node count the current data block refers to
  bool cell_block = false;
  while (!t.at_end()) {
    const auto kw = t.next();
    if (kw == "CELL_DATA" || kw == "POINT_DATA") {
      cell_block = kw == "CELL_DATA";
      attached = t.index();
      if (attached != (cell_block ? m.hexes.size() : m.nodes.size())) t.fail(std::string(kw) + " count mismatch");
    } else if (kw == "SCALARS") {
      const std::string name(t.next());
      t.next();
      if (t.peek() != "LOOKUP_TABLE") t.index();
      t.expect("LOOKUP_TABLE");
      t.next();
      std::vector<double> v(attached);
      for (auto& x : v) x = t.number();
      if (name == "max_abs_principal_stress_kPa") doc.fields.max_abs_principal = std::move(v);
      else if (name == "min_scaled_jacobian") doc.fields.scaled_jacobian = std::move(v);
    } else if (kw == "TENSORS") {
      const std::string name(t.next());
      t.next();
      std::vector<fea::StressTensor> v(attached);
      for (auto& s : v)
        for (auto& row : s)
          for (auto& x : row) x = t.number();
      if (name == "stress_kPa") doc.fields.stress = std::move(v);
    } else if (kw == "VECTORS") {
      const std::string name(t.next());
      t.next();
      std::vector<Vec3> v(attached);
      for (auto& p : v) p = t.vec();
      if (name == "displacement_mm") doc.fields.displacement = std::move(v);
    } else {
      t.fail("unexpected keyword '" + std::string(kw) + "'");
    }
  }
  return doc;
}

HexDocument read_hex_vtk(const std::filesystem::path& path) { return parse_hex_vtk(read_file(path), path.string()); }

}  // namespace aorta::io
