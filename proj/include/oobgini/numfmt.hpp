#pragma once

#include <charconv>
#include <string>

namespace oobgini {

// Shortest round-trip decimal form, locale-independent.
inline std::string to_string_shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace oobgini
