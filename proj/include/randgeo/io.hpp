#pragma once

#include <string>
#include <string_view>

namespace randgeo::io {

/// 17 significant digits, "C"-locale formatting: round-trips every binary64 value.
std::string format_g17(double value);

/// Shortest representation that round-trips.
std::string format_shortest(double value);

/// Locale-independent full-string parse. Throws std::invalid_argument on junk.
double parse_double(std::string_view text);

long long parse_integer(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace randgeo::io
