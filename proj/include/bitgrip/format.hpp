#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace bitgrip {

/// Version stamped into every JSON document the library writes.
inline constexpr int kSchemaVersion = 1;

/// Fixed six-decimal rendering with trailing zeros trimmed ("36.2", "10").
inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v + 0.0);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

inline double round_to(double v, int digits) {
  const double scale = std::pow(10.0, digits);
  return std::round(v * scale) / scale + 0.0;
}

}  // namespace bitgrip
