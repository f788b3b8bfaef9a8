#pragma once

#include <filesystem>

#include "aortamesh/geometry.hpp"

namespace aorta::io {

enum class StlFormat { Binary, Ascii };

/// Reads binary or ASCII STL (detected from the size/header). Corners with
/// bitwise-equal coordinates are merged into one vertex, numbered in order
/// of first appearance.
TriangleSurface read_stl(const std::filesystem::path& path);
/// ASCII STL keeps 17 significant digits; binary STL stores float32.
void write_stl(const std::filesystem::path& path, const TriangleSurface& surface, StlFormat format = StlFormat::Binary);

/// Wavefront OBJ: "v" and "f" records only; polygon faces are fanned.
TriangleSurface read_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const TriangleSurface& surface);

/// Dispatch on the extension (.stl or .obj, case-insensitive).
TriangleSurface read_surface(const std::filesystem::path& path);
void write_surface(const std::filesystem::path& path, const TriangleSurface& surface);

}  // namespace aorta::io
