#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nnse::io {

// Whole-file read; throws DataError when the file cannot be opened.
std::string read_file(const std::string& path);

// Throws DataError on any I/O failure.
void write_file(const std::string& path, std::string_view contents);

// Shortest decimal form that round-trips exactly (17 significant digits at
// most), independent of locale.
std::string format_double(double v);

// Strict full-token parse; returns false on trailing garbage or overflow.
bool parse_double(std::string_view token, double& out);

std::vector<std::string_view> split_whitespace(std::string_view line);

}  // namespace nnse::io
