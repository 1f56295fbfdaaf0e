#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fq {

// Shortest text that parses back to the identical double.
std::string format_double(double value);
// Fixed-precision text for human-facing reports.
std::string format_fixed(double value, int precision);

// Strict numeric parsing of a whole field (surrounding blanks allowed).
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, std::int64_t& out);

std::string_view trim(std::string_view text) noexcept;
std::vector<std::string_view> split(std::string_view text, char delimiter);
std::string join(std::span<const std::string> parts, std::string_view separator);

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace fq
