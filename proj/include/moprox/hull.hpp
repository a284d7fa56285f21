#pragma once

#include <vector>

#include "moprox/errors.hpp"
#include "moprox/vec.hpp"

namespace moprox {

/// Minimum-norm point of a convex hull of finitely many generators.
struct MinNormResult {
  Vec point;
  Vec weights;  // one per input generator, >= 0, summing to 1
  double norm = 0.0;
};

/// Wolfe's min-norm-point algorithm over conv{generators}. Deterministic:
/// ties pick the lowest index, duplicates (within 1e-14) share one
/// representative whose weight absorbs the group. The result satisfies the
/// variational inequality <point, g> >= |point|^2 - tol for every generator.
MinNormResult min_norm_point(const std::vector<Vec>& generators);

/// Exhaustive oracle: minimizes |sum w_i g_i| over the uniform grid of the
/// weight simplex with grid_steps subdivisions. Only for <= 4 generators.
Vec brute_force_min_norm(const std::vector<Vec>& generators, int grid_steps);

}  // namespace moprox
