#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dbfuzz {

std::string_view trim(std::string_view s);
std::string to_upper(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool starts_with_ci(std::string_view s, std::string_view prefix);
std::vector<std::string> split_lines(std::string_view text);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Reads a whole file; throws dbfuzz::Error when it cannot be opened.
std::string read_file(const std::string& path);
/// Writes atomically enough for our purposes (truncate + write).
void write_file(const std::string& path, std::string_view contents);

}  // namespace dbfuzz
