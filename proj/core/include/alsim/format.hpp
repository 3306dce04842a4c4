#pragma once

#include <string>
#include <string_view>

namespace alsim {

// Shortest representation that parses back to the identical double.
std::string format_double(double value);
// Strict full-token parse; throws InvalidArgument on trailing junk.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace alsim
