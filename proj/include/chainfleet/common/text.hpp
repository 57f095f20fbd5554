#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace chainfleet {

// Shortest round-trip decimal form; identical bits always print identically.
std::string format_double(double v);

// Fixed-point with `digits` decimals, used for human-facing CSV columns.
std::string format_fixed(double v, int digits);

std::vector<std::string> split(std::string_view line, char sep);

// Strict full-string numeric parsing; throw std::invalid_argument on junk.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

}  // namespace chainfleet
