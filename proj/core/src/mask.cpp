#include "aortamesh/mask.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <string>

#include "aortamesh/error.hpp"
#include "aortamesh/file_util.hpp"

namespace aorta::io {

void validate(const VoxelMask& m) {
  for (std::size_t a = 0; a < 3; ++a) {
    if (m.dims[a] < 2) throw Error(ErrorKind::CorruptMask, "mask dimension " + std::to_string(a) + " is below 2");
    if (!(m.spacing[a] > 0.0) || !std::isfinite(m.spacing[a])) {
      throw Error(ErrorKind::CorruptMask, "mask spacing must be positive");
    }
  }
  const std::size_t expect = m.dims[0] * m.dims[1] * m.dims[2];
  if (m.values.size() != expect) {
    throw Error(ErrorKind::CorruptMask, "mask holds " + std::to_string(m.values.size()) + " values, dims imply " +
                                            std::to_string(expect));
  }
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    if (m.values[i] > 1) {
      throw Error(ErrorKind::CorruptMask,
                  "mask value " + std::to_string(m.values[i]) + " at byte " + std::to_string(i) + " is not 0 or 1", {i});
    }
  }
}

namespace {

Vec3 vec_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::CorruptMask, std::string("mask header missing field '") + key + "'");
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw Error(ErrorKind::CorruptMask, std::string("'") + key + "' needs 3 numbers");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

}  // namespace

VoxelMask read_mask(const std::filesystem::path& header_path) {
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(read_file(header_path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, header_path.string() + ": byte " + std::to_string(e.byte) + ": " + e.what());
  }
  VoxelMask m;
  try {
    if (!h.contains("dims") || !h["dims"].is_array() || h["dims"].size() != 3) {
      throw Error(ErrorKind::CorruptMask, "mask header missing field 'dims'");
    }
    for (std::size_t a = 0; a < 3; ++a) {
      const long d = h["dims"][a].get<long>();
      if (d < 0) throw Error(ErrorKind::CorruptMask, "negative mask dimension");
      m.dims[a] = static_cast<std::size_t>(d);
    }
    m.spacing = vec_field(h, "spacing");
    m.origin = vec_field(h, "origin");
    if (!h.contains("data") || !h["data"].is_string()) {
      throw Error(ErrorKind::CorruptMask, "mask header missing field 'data'");
    }
    const std::string raw = read_file(header_path.parent_path() / h["data"].get<std::string>());
    m.values.assign(raw.begin(), raw.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptMask, header_path.string() + ": " + e.what());
  }
  validate(m);
  return m;
}

void write_mask(const std::filesystem::path& header_path, const VoxelMask& mask) {
  validate(mask);
  std::filesystem::path raw = header_path;
  raw.replace_extension(".raw");
  nlohmann::json h;
  h["dims"] = {mask.dims[0], mask.dims[1], mask.dims[2]};
  h["spacing"] = {mask.spacing.x, mask.spacing.y, mask.spacing.z};
  h["origin"] = {mask.origin.x, mask.origin.y, mask.origin.z};
  h["data"] = raw.filename().string();
  write_file_atomic(raw, std::string_view(reinterpret_cast<const char*>(mask.values.data()), mask.values.size()));
  write_file_atomic(header_path, h.dump(2) + "\n");
}

}  // namespace aorta::io
