#pragma once

#include <filesystem>
#include <string>

namespace imprint {

/// Reads a whole file; Error(io_error) if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames it into place, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace imprint
