#include "moprox/scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace moprox {

namespace {

struct GridPoint {
  Vec x;
  Vec f;
};

bool strictly_dominates(const Vec& a, const Vec& b) {
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] >= b[j]) return false;
  return true;
}

// Bicriteria sweep: sort by f1, then a prefix minimum of f2 over strictly
// smaller f1 values decides domination in O(G log G).
std::vector<bool> dominated_sweep(const std::vector<GridPoint>& pts) {
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pts[a].f[0] != pts[b].f[0]) return pts[a].f[0] < pts[b].f[0];
    return pts[a].f[1] < pts[b].f[1];
  });

  std::vector<bool> dominated(pts.size(), false);
  double prefix_min_f2 = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t group_end = i;
    while (group_end < order.size() && pts[order[group_end]].f[0] == pts[order[i]].f[0])
      ++group_end;
    for (std::size_t a = i; a < group_end; ++a)
      if (prefix_min_f2 < pts[order[a]].f[1]) dominated[order[a]] = true;
    for (std::size_t a = i; a < group_end; ++a)
      prefix_min_f2 = std::min(prefix_min_f2, pts[order[a]].f[1]);
    i = group_end;
  }
  return dominated;
}

std::vector<bool> dominated_pairwise(const std::vector<GridPoint>& pts) {
  std::vector<bool> dominated(pts.size(), false);
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = 0; b < pts.size(); ++b)
      if (a != b && strictly_dominates(pts[b].f, pts[a].f)) {
        dominated[a] = true;
        break;
      }
  return dominated;
}

}  // namespace

std::vector<Vec> pareto_scan_grid(const Problem& p, const Vec& lo, const Vec& hi, double step) {
  const int n = p.nvars();
  if (n > 2) throw ValidationError("pareto scan supports 1 or 2 variables");
  if (lo.size() != static_cast<std::size_t>(n) || hi.size() != static_cast<std::size_t>(n))
    throw ValidationError("scan bounds must have nvars entries");
  if (!(step > 0.0)) throw ValidationError("scan step must be positive");
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw ValidationError("scan bounds must be finite");
    if (lo[i] > hi[i]) throw ValidationError("scan lower bound above upper bound");
  }

  std::vector<long> counts(n);
  for (int i = 0; i < n; ++i)
    counts[i] = static_cast<long>(std::floor((hi[i] - lo[i]) / step + 1e-9)) + 1;

  std::vector<GridPoint> pts;
  Vec x(n);
  for (long a = 0; a < counts[0]; ++a) {
    x[0] = lo[0] + static_cast<double>(a) * step;
    for (long b = 0; b < (n == 2 ? counts[1] : 1); ++b) {
      if (n == 2) x[1] = lo[1] + static_cast<double>(b) * step;
      if (!p.box().contains(x)) continue;
      pts.push_back(GridPoint{x, p.evaluate(x)});
    }
  }
  if (pts.empty()) return {};

  std::vector<bool> dominated = p.num_components() == 2 ? dominated_sweep(pts)
                                                        : dominated_pairwise(pts);
  std::vector<Vec> out;
  for (std::size_t a = 0; a < pts.size(); ++a)
    if (!dominated[a]) out.push_back(pts[a].x);
  return out;
}

}  // namespace moprox
