#pragma once

#include <string>

namespace pingpong {

// Shortest decimal text that round-trips to the same double. Locale
// independent, '.' separator, negative zero printed as "0".
std::string format_double(double value);

}  // namespace pingpong
