#pragma once

#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace pbessel {

// Round-trip-safe decimal form of a double (17 significant digits).
inline std::string g17(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "inf";
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "inf" || s == "+inf" || s == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  if (s == "-inf" || s == "-infinity") {
    return -std::numeric_limits<double>::infinity();
  }
  std::size_t pos = 0;
  double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

}  // namespace pbessel
