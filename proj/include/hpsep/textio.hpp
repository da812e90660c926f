#pragma once

#include <string>
#include <string_view>

namespace hpsep {

/// Shortest decimal form that round-trips to the same double bit pattern.
std::string format_double(double v);

/// Strict full-token parses; throw FormatError naming the bad token.
double parse_double(std::string_view token);
long parse_long(std::string_view token);

}  // namespace hpsep
