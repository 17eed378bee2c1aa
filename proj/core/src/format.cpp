#include "pingpong/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace pingpong {

std::string format_double(double value) {
  if (value == 0.0) return "0";
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buffer.data(), end);
}

}  // namespace pingpong
