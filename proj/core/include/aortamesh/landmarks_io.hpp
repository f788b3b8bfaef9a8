#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "aortamesh/geometry.hpp"

namespace aorta::io {

/// Landmark JSON:
///   { "hinge_points": [[x,y,z] x 3],
///     "end_curve": [[x,y,z], ...],
///     "arch_curves": [[[x,y,z], ...], ...],
///     "centerline": { "points": [[x,y,z], ...], "radii": [r, ...] },   radii optional
///     "region_breakpoints": [i, j, k] }                                 optional
/// Throws Error(Parse) naming the missing or malformed field, then applies
/// validate(LandmarkSet).
LandmarkSet parse_landmarks(std::string_view json_text, const std::string& source = "<landmarks>");
LandmarkSet read_landmarks(const std::filesystem::path& path);

std::string landmarks_to_json(const LandmarkSet& landmarks);
void write_landmarks(const std::filesystem::path& path, const LandmarkSet& landmarks);

}  // namespace aorta::io
