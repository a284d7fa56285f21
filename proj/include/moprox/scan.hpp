#pragma once

#include <vector>

#include "moprox/problem.hpp"
#include "moprox/vec.hpp"

namespace moprox {

/// Weak-Pareto filter over the uniform grid of [lo, hi] with the given step
/// (1 or 2 variables). A grid point is kept unless some other grid point is
/// strictly better in every component. Grid points outside the open domain
/// box are ignored. Output is in row-major grid order regardless of how the
/// comparison is organized internally.
std::vector<Vec> pareto_scan_grid(const Problem& p, const Vec& lo, const Vec& hi, double step);

}  // namespace moprox
