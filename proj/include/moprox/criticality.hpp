#pragma once

#include <optional>
#include <vector>

#include "moprox/problem.hpp"
#include "moprox/vec.hpp"

namespace moprox {

/// Certificate for the Pareto-Clarke test 0 in conv(union of eps-active
/// gradients). residual is the norm of the min-norm point of that hull;
/// when it exceeds 1e-8 a normalized descent direction is attached, along
/// which every component's active directional derivative bound is negative.
struct CriticalityCertificate {
  double residual = 0.0;
  Vec hull_point;
  std::vector<double> weights;      // per generator
  std::vector<PieceRef> generator_tags;
  std::optional<Vec> descent_direction;
  Vec directional_upper_bounds;     // per component, only when direction present
};

/// nullopt eps picks the default band 1e-6 * (1 + |f_j(x)|) per component.
CriticalityCertificate criticality_residual(const Problem& p, const Vec& x,
                                            std::optional<double> eps_act = std::nullopt);

bool is_critical(const Problem& p, const Vec& x, double tol);

/// Smooth single-piece specialization: true iff no direction strictly
/// decreases every component at x. Errors if any component has several pieces.
bool smooth_case_check(const Problem& p, const Vec& x);

struct MarginScanReport {
  double min_margin = 0.0;
  Vec argmin_x;
  Vec argmin_z;
  long samples = 0;  // grid points inside S_F(F(ybar)) \ S_F(c e)
  long skipped = 0;  // grid points outside, ignored
};

/// Scans |sum_j z_j g_j| over x in the grid (restricted to the annulus
/// S_F(F(ybar)) \ S_F(c e)), z on the l1 simplex grid, and all selections of
/// eps-active gradients g_j. A positive min_margin supports hypothesis (H3).
MarginScanReport h3_margin_scan(const Problem& p, double c, const std::vector<Vec>& x_grid,
                                int z_grid_steps);

}  // namespace moprox
