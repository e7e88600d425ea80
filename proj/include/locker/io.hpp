#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace locker {

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// Shortest round-trip decimal form of `v`.
std::string format_double(double v);

/// Fixed number of significant digits, for human-facing tables.
std::string format_double(double v, int significant);

}  // namespace locker
