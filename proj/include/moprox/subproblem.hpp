#pragma once

#include <optional>
#include <vector>

#include "moprox/problem.hpp"
#include "moprox/vec.hpp"

namespace moprox {

/// One proximal subproblem: minimize over the box
///   Phi(y) = max_j max_i (f_ij(y) - f_j(center)) / e_j + (lambda/2)|y - center|^2.
/// Phi(center) = 0, any minimizer has Phi <= 0, so every component of F is
/// nonincreasing across the step. With lambda * e_j above the componentwise
/// gradient-Lipschitz bound, Phi is strongly convex and the step is unique.
struct ProxInstance {
  ProxInstance(const Problem& p, Vec center, double lambda, Vec weights_e);

  const Problem* problem;
  Vec center;
  double lambda;
  Vec weights_e;
  Vec center_values;  // F(center)

  /// min_j (lambda * e_j - max_i L_ij); positive iff the threshold holds.
  double convexity_margin() const;
};

struct ScalarizedEval {
  double value = 0.0;
  std::vector<Vec> generators;      // grad f_ij(y)/e_j + lambda (y - center), eps-active (i,j)
  std::vector<PieceRef> piece_tags;  // origin of each generator
};

/// Phi value only (used by line searches).
double scalarized_value(const ProxInstance& inst, const Vec& y);

/// Phi value plus subdifferential generators of the eps-active pieces.
/// nullopt eps picks the default band 1e-6 * (1 + |max term|).
ScalarizedEval scalarized_value_and_generators(const ProxInstance& inst, const Vec& y,
                                               std::optional<double> eps_act = std::nullopt);

struct ProxStepResult {
  Vec next;
  Vec weights_z;              // scalarization weights recovered at next, |z| = 1
  int inner_iterations = 0;
  double final_stationarity = 0.0;
  Vec objective_gap_vector;   // F(center) - F(next), componentwise >= -1e-10
  bool converged = false;
};

/// Epsilon-active steepest descent on Phi: direction is minus the min-norm
/// point of the active generators, step chosen by bracketing the sign change
/// of the directional derivative (Phi is convex along rays, and gradient
/// round-off is far below value round-off near the minimum), steps truncated
/// to the open box, eps widened x10 (up to 1e-2) on stalls.
ProxStepResult solve_inner(const ProxInstance& inst, double tol_inner, int max_inner);
ProxStepResult solve_inner(const ProxInstance& inst, double tol_inner, int max_inner,
                           const Vec& start);

/// Counts sampled violations of the strong-convexity secant inequality for
/// Phi with modulus nu = min_j(lambda e_j - max_i L_ij)/2, beyond 1e-8.
/// Points are drawn from S_F(F(reference_point)).
int strong_convexity_violations(const ProxInstance& inst, int trials, std::uint64_t seed);

/// True iff no violation was found.
bool strong_convexity_probe(const ProxInstance& inst, int trials, std::uint64_t seed);

}  // namespace moprox
