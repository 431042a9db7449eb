#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imgrl::text {

/// Shortest text that parses back to the identical double.
std::string exact(double v);
/// Fixed-point with `digits` decimals ("%.*f").
std::string fixed(double v, int digits);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::vector<std::string_view> split(std::string_view line, char sep);
/// Splits on '\n', dropping a trailing '\r' from each line and a final empty line.
std::vector<std::string_view> lines(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace imgrl::text
