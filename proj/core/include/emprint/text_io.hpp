#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emprint::text {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

/// Whole-token decimal parse with optional exponent; nullopt on junk.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split(std::string_view s, char sep);

/// Parses "# <tag> v1, key=value, ..." into its tag and key/value pairs.
struct Header {
  std::string tag;
  std::map<std::string, std::string, std::less<>> fields;
};
std::optional<Header> parse_header(std::string_view line);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace emprint::text
