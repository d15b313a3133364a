#pragma once

// Small helpers shared by the text-file writers and readers.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace wudrift::io {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

double parse_double(std::string_view text);
std::uint64_t parse_uint(std::string_view text);
std::int64_t parse_int(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep);

// Replaces tabs and line breaks with spaces.
std::string sanitize_field(std::string_view text);

std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace wudrift::io
