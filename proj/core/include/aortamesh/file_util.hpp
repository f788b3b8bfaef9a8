#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace aorta::io {

/// Whole file as bytes. Throws Error(Io) if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file. Parent directories are created.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

/// printf-style "%.17g"; round-trips every finite double.
std::string format_double(double v);

}  // namespace aorta::io
