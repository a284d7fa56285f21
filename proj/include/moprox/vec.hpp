#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace moprox {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_sq(const Vec& v) { return dot(v, v); }
inline double norm(const Vec& v) { return std::sqrt(norm_sq(v)); }

inline double dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// a + s*b
inline Vec add_scaled(const Vec& a, double s, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + s * b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scaled(const Vec& a, double s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

inline bool leq_componentwise(const Vec& a, const Vec& b, double slack = 0.0) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i] + slack) return false;
  return true;
}

}  // namespace moprox
