#include "aortamesh/surface_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "aortamesh/error.hpp"
#include "aortamesh/file_util.hpp"

namespace aorta::io {

namespace {

[[noreturn]] void parse_error(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line) + ": " + msg);
}

class VertexWelder {
 public:
  explicit VertexWelder(TriangleSurface& s) : s_(s) {}
  std::size_t add(const Vec3& p) {
    auto [it, inserted] = ids_.try_emplace(std::make_tuple(p.x, p.y, p.z), s_.vertices.size());
    if (inserted) s_.vertices.push_back(p);
    return it->second;
  }

 private:
  TriangleSurface& s_;
  std::map<std::tuple<double, double, double>, std::size_t> ids_;
};

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

template <typename T>
void store_le(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

TriangleSurface parse_binary_stl(const std::string& data) {
  const auto n = load_le<std::uint32_t>(data.data() + 80);
  TriangleSurface s;
  VertexWelder weld(s);
  s.triangles.reserve(n);
  for (std::uint32_t t = 0; t < n; ++t) {
    const char* rec = data.data() + 84 + 50 * std::size_t(t);
    std::array<std::size_t, 3> tri;
    for (int c = 0; c < 3; ++c) {
      const char* p = rec + 12 + 12 * c;
      tri[c] = weld.add({load_le<float>(p), load_le<float>(p + 4), load_le<float>(p + 8)});
    }
    s.triangles.push_back(tri);
  }
  return s;
}

double parse_number(const std::string& tok, const std::filesystem::path& path, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) parse_error(path, line, "malformed number '" + tok + "'");
    return v;
  } catch (const std::logic_error&) {
    parse_error(path, line, "malformed number '" + tok + "'");
  }
}

TriangleSurface parse_ascii_stl(const std::string& data, const std::filesystem::path& path) {
  TriangleSurface s;
  VertexWelder weld(s);
  std::istringstream in(data);
  std::string line_text;
  std::size_t line = 0;
  std::vector<std::size_t> loop;
  bool in_loop = false;
  bool saw_solid = false;
  while (std::getline(in, line_text)) {
    ++line;
    std::istringstream ls(line_text);
    std::string kw;
    if (!(ls >> kw)) continue;
    if (kw == "solid") {
      saw_solid = true;
    } else if (kw == "facet" || kw == "endsolid") {
      if (!saw_solid) parse_error(path, line, "'" + kw + "' before 'solid'");
    } else if (kw == "outer") {
      if (in_loop) parse_error(path, line, "nested 'outer loop'");
      in_loop = true;
      loop.clear();
    } else if (kw == "vertex") {
      if (!in_loop) parse_error(path, line, "'vertex' outside 'outer loop'");
      std::string a, b, c, extra;
      if (!(ls >> a >> b >> c) || (ls >> extra)) parse_error(path, line, "vertex needs exactly 3 coordinates");
      loop.push_back(weld.add({parse_number(a, path, line), parse_number(b, path, line), parse_number(c, path, line)}));
    } else if (kw == "endloop") {
      if (!in_loop || loop.size() != 3) parse_error(path, line, "facet loop must have exactly 3 vertices");
      s.triangles.push_back({loop[0], loop[1], loop[2]});
      in_loop = false;
    } else if (kw != "endfacet") {
      parse_error(path, line, "unexpected token '" + kw + "'");
    }
  }
  if (!saw_solid) parse_error(path, 1, "missing 'solid' header");
  if (in_loop) parse_error(path, line, "unterminated facet loop");
  return s;
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

}  // namespace

TriangleSurface read_stl(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  if (data.size() >= 84) {
    const auto n = load_le<std::uint32_t>(data.data() + 80);
    if (84 + 50 * std::size_t(n) == data.size()) return parse_binary_stl(data);
  }
  const auto first = data.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || data.compare(first, 5, "solid") != 0) {
    throw Error(ErrorKind::Parse, path.string() + ": byte " + std::to_string(data.size()) +
                                      ": neither a complete binary STL nor an ASCII 'solid'");
  }
  return parse_ascii_stl(data, path);
}

void write_stl(const std::filesystem::path& path, const TriangleSurface& surface, StlFormat format) {
  std::string out;
  if (format == StlFormat::Binary) {
    out.assign(80, '\0');
    const char header[] = "aortamesh binary stl";
    std::memcpy(out.data(), header, sizeof header - 1);
    store_le<std::uint32_t>(out, static_cast<std::uint32_t>(surface.triangles.size()));
    for (const auto& t : surface.triangles) {
      const Vec3& a = surface.vertices[t[0]];
      const Vec3& b = surface.vertices[t[1]];
      const Vec3& c = surface.vertices[t[2]];
      Vec3 n = cross(b - a, c - a);
      const double len = norm(n);
      if (len > 0.0) n = n / len;
      for (const Vec3& p : {n, a, b, c}) {
        store_le<float>(out, float(p.x));
        store_le<float>(out, float(p.y));
        store_le<float>(out, float(p.z));
      }
      store_le<std::uint16_t>(out, 0);
    }
  } else {
    out = "solid aortamesh\n";
    for (const auto& t : surface.triangles) {
      const Vec3& a = surface.vertices[t[0]];
      const Vec3& b = surface.vertices[t[1]];
      const Vec3& c = surface.vertices[t[2]];
      Vec3 n = cross(b - a, c - a);
      const double len = norm(n);
      if (len > 0.0) n = n / len;
      out += "facet normal " + format_double(n.x) + " " + format_double(n.y) + " " + format_double(n.z) + "\n";
      out += "  outer loop\n";
      for (const Vec3* p : {&a, &b, &c}) {
        out += "    vertex " + format_double(p->x) + " " + format_double(p->y) + " " + format_double(p->z) + "\n";
      }
      out += "  endloop\nendfacet\n";
    }
    out += "endsolid aortamesh\n";
  }
  write_file_atomic(path, out);
}

TriangleSurface read_obj(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  TriangleSurface s;
  std::istringstream in(data);
  std::string line_text;
  std::size_t line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    std::istringstream ls(line_text);
    std::string kw;
    if (!(ls >> kw) || kw[0] == '#') continue;
    if (kw == "v") {
      std::string a, b, c;
      if (!(ls >> a >> b >> c)) parse_error(path, line, "vertex needs 3 coordinates");
      s.vertices.push_back({parse_number(a, path, line), parse_number(b, path, line), parse_number(c, path, line)});
    } else if (kw == "f") {
      std::vector<std::size_t> poly;
      std::string tok;
      while (ls >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        long idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stol(head, &used);
          if (used != head.size()) throw std::invalid_argument(head);
        } catch (const std::logic_error&) {
          parse_error(path, line, "malformed face index '" + tok + "'");
        }
        const long nv = static_cast<long>(s.vertices.size());
        const long resolved = idx < 0 ? nv + idx : idx - 1;
        if (idx == 0 || resolved < 0 || resolved >= nv) parse_error(path, line, "face index " + head + " out of range");
        poly.push_back(static_cast<std::size_t>(resolved));
      }
      if (poly.size() < 3) parse_error(path, line, "face needs at least 3 vertices");
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) s.triangles.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  return s;
}

void write_obj(const std::filesystem::path& path, const TriangleSurface& surface) {
  std::string out = "# aortamesh surface\n";
  for (const auto& v : surface.vertices) {
    out += "v " + format_double(v.x) + " " + format_double(v.y) + " " + format_double(v.z) + "\n";
  }
  for (const auto& t : surface.triangles) {
    out += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + "\n";
  }
  write_file_atomic(path, out);
}

TriangleSurface read_surface(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".stl") return read_stl(path);
  if (ext == ".obj") return read_obj(path);
  throw Error(ErrorKind::InvalidArgument, "unsupported surface format '" + ext + "' (expected .stl or .obj)");
}

void write_surface(const std::filesystem::path& path, const TriangleSurface& surface) {
  const std::string ext = lower_extension(path);
  if (ext == ".stl") return write_stl(path, surface);
  if (ext == ".obj") return write_obj(path, surface);
  throw Error(ErrorKind::InvalidArgument, "unsupported surface format '" + ext + "' (expected .stl or .obj)");
}

}  // namespace aorta::io
