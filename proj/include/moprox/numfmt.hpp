#pragma once

#include <charconv>
#include <string>

namespace moprox {

// 17 significant digits: enough to reproduce any double exactly, locale-free.
inline std::string repr17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// Shortest representation that round-trips; used for expression printing.
inline std::string repr_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, bool* ok = nullptr) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ok) *ok = (res.ec == std::errc() && res.ptr == s.data() + s.size());
  return v;
}

}  // namespace moprox
