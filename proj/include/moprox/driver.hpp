#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moprox/problem.hpp"
#include "moprox/vec.hpp"

namespace moprox {

/// Outer-loop parameters. Constant lambda/e by default; per-iteration
/// sequences (clamped to their last entry) may override them, and every
/// emitted pair is re-validated against the thresholds:
///   |e| = 1,  e_j > mu_bar,  (1/mu_bar) max_i L_ij < lambda <= lambda_bar.
struct SolverConfig {
  double mu_bar = 0.0;
  double lambda_bar = 0.0;
  double lambda_constant = 0.0;
  Vec e_constant;
  std::vector<double> lambda_sequence;  // optional
  std::vector<Vec> e_sequence;          // optional

  double tol_outer = 1e-8;
  int max_outer = 1000;
  double tol_inner = 1e-9;
  int max_inner = 1000;
  std::optional<double> eps_active;  // nullopt: relative default band

  /// Skips only the lambda-threshold test (negative-control experiments).
  bool override_lambda_check = false;

  double lambda_at(int k) const;
  Vec e_at(int k) const;
  void validate(const Problem& p) const;
};

/// mu_bar = 0.9/sqrt(m), e = (1/sqrt(m),...), lambda = 1.01 * maxL / mu_bar,
/// lambda_bar = 10 * lambda, tol_inner = min(1e-8, tol_outer/10).
SolverConfig default_config(const Problem& p);

struct IterateRecord {
  int k = 0;
  Vec x;
  Vec F_of_x;
  // Fields below describe the step that produced x; NaN/empty at k = 0.
  double lambda_k = 0.0;
  Vec e_k;
  Vec z_k;
  double step_norm = 0.0;
  int inner_iterations = 0;
  double stationarity = 0.0;
  double criticality_residual = 0.0;
};

enum class SolveStatus { converged, max_iterations, error };

struct Trace {
  std::vector<IterateRecord> records;
  SolveStatus status = SolveStatus::error;
  Vec final_point;
};

std::string to_string(SolveStatus s);

/// Runs the proximal point iteration from x0 (which must satisfy
/// F(x0) <= F(reference_point); the method confines iterates to that
/// sublevel set). Stops when |x_{k+1} - x_k| <= tol_outer. Throws
/// ValidationError for bad configs or infeasible x0, SolveError when an
/// inner solve fails to converge.
Trace solve(const Problem& p, const Vec& x0, const SolverConfig& cfg);

/// Smallest k with F(x^k) <= c componentwise, if any.
std::optional<int> sublevel_entry(const Trace& t, double c);

/// Number of (k, j) pairs where component j increased beyond 1e-10.
int monotone_violations(const Trace& t);

}  // namespace moprox
