#include "contagion/detail/format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace contagion::detail {

std::string format_double(double value) {
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string format_fixed(double value, int decimals) {
  std::array<char, 64> buf;
  const int len = std::snprintf(buf.data(), buf.size(), "%.*f", decimals, value);
  return std::string(buf.data(), static_cast<std::size_t>(len));
}

}  // namespace contagion::detail
