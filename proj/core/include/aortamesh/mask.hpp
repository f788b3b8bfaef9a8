#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "aortamesh/vec3.hpp"

namespace aorta::io {

/// Binary segmentation volume, x-fastest: value(i, j, k) = values[i + nx * (j + ny * k)].
struct VoxelMask {
  std::array<std::size_t, 3> dims{0, 0, 0};
  Vec3 spacing{1.0, 1.0, 1.0};  // mm
  Vec3 origin;                  // world position of voxel (0, 0, 0), mm
  std::vector<std::uint8_t> values;

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return i + dims[0] * (j + dims[1] * k); }
  std::uint8_t at(std::size_t i, std::size_t j, std::size_t k) const { return values[index(i, j, k)]; }
  Vec3 position(double i, double j, double k) const {
    return {origin.x + spacing.x * i, origin.y + spacing.y * j, origin.z + spacing.z * k};
  }
};

/// Throws Error(CorruptMask) on dims < 2, non-positive spacing, a value
/// count that disagrees with dims, or values outside {0, 1}.
void validate(const VoxelMask& mask);

/// Header: {"dims": [nx, ny, nz], "spacing": [..], "origin": [..], "data": "<raw file>"}.
/// The raw path is relative to the header's directory.
VoxelMask read_mask(const std::filesystem::path& header_path);

/// Writes the header and a raw byte file named after it (".raw" extension).
void write_mask(const std::filesystem::path& header_path, const VoxelMask& mask);

}  // namespace aorta::io
