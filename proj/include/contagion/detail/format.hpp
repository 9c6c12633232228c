#pragma once

#include <string>

namespace contagion::detail {

// Shortest round-trip decimal form, locale-free and platform-stable.
std::string format_double(double value);

// Fixed decimals, for table-style CSV columns.
std::string format_fixed(double value, int decimals);

}  // namespace contagion::detail
