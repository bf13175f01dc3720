#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pricelab::csv {

/// Splits one line on commas, trimming blanks and a trailing carriage return.
std::vector<std::string_view> split(std::string_view line);

/// Lines of the text without their terminators.
std::vector<std::string_view> lines(std::string_view text);

double parse_double(std::string_view s, std::size_t line, const char* field);
long long parse_int(std::string_view s, std::size_t line, const char* field);

/// Shortest representation that round-trips.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace pricelab::csv
