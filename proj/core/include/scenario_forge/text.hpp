#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sforge::text {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double value);

/// Parses a finite decimal; returns false on junk, trailing characters, NaN or inf.
bool parse_finite(std::string_view field, double& out);

std::string_view trim(std::string_view s);

/// Splits a CSV record on commas (no quoting; none of our schemas need it).
std::vector<std::string_view> split_fields(std::string_view line);

}  // namespace sforge::text
