#pragma once

#include <string>
#include <vector>

namespace wlmsc {

// Writes via a temp file in the same directory, then renames into place.
void write_file_atomic(const std::string& path, const std::string& contents);

// Reads all lines, stripping trailing \r. Throws if the file cannot be opened.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace wlmsc
