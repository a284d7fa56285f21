#include "moprox/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "moprox/criticality.hpp"
#include "moprox/subproblem.hpp"

namespace moprox {

double SolverConfig::lambda_at(int k) const {
  if (lambda_sequence.empty()) return lambda_constant;
  return lambda_sequence[std::min<std::size_t>(k, lambda_sequence.size() - 1)];
}

Vec SolverConfig::e_at(int k) const {
  if (e_sequence.empty()) return e_constant;
  return e_sequence[std::min<std::size_t>(k, e_sequence.size() - 1)];
}

namespace {

void validate_step_params(const Problem& p, const SolverConfig& cfg, double lambda,
                          const Vec& e) {
  if (e.size() != static_cast<std::size_t>(p.num_components()))
    throw ValidationError("weight vector e must have one entry per component");
  if (std::fabs(norm(e) - 1.0) > 1e-12) throw ValidationError("weight vector e must have unit norm");
  for (double ej : e)
    if (!(ej > cfg.mu_bar))
      throw ValidationError("every e_j must exceed mu_bar");
  if (!(lambda <= cfg.lambda_bar)) throw ValidationError("lambda exceeds lambda_bar");
  if (!cfg.override_lambda_check) {
    for (int j = 0; j < p.num_components(); ++j)
      if (!(lambda > p.max_lipschitz(j) / cfg.mu_bar))
        throw ValidationError(
            "lambda below the threshold max_i L_ij / mu_bar for component '" +
            p.component(j).name + "' (pass the override to run anyway)");
  }
}

}  // namespace

void SolverConfig::validate(const Problem& p) const {
  if (!(mu_bar > 0.0 && mu_bar < 1.0)) throw ValidationError("mu_bar must lie in (0, 1)");
  if (!(lambda_bar > 0.0)) throw ValidationError("lambda_bar must be positive");
  if (!(tol_outer > 0.0)) throw ValidationError("tol_outer must be positive");
  if (!(tol_inner > 0.0)) throw ValidationError("tol_inner must be positive");
  if (max_outer < 1) throw ValidationError("max_outer must be >= 1");
  if (max_inner < 0) throw ValidationError("max_inner must be >= 0");
  if (eps_active && *eps_active < 0.0) throw ValidationError("eps_active must be nonnegative");
  validate_step_params(p, *this, lambda_at(0), e_at(0));
}

SolverConfig default_config(const Problem& p) {
  const int m = p.num_components();
  SolverConfig cfg;
  cfg.mu_bar = 0.9 / std::sqrt(static_cast<double>(m));
  cfg.e_constant.assign(m, 1.0 / std::sqrt(static_cast<double>(m)));
  double max_l = 0.0;
  for (int j = 0; j < m; ++j) max_l = std::max(max_l, p.max_lipschitz(j));
  cfg.lambda_constant = 1.01 * max_l / cfg.mu_bar;
  cfg.lambda_bar = 10.0 * cfg.lambda_constant;
  cfg.tol_outer = 1e-8;
  cfg.tol_inner = std::min(1e-8, cfg.tol_outer / 10.0);
  cfg.max_outer = 1000;
  cfg.max_inner = 1000;
  return cfg;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    default: return "error";
  }
}

Trace solve(const Problem& p, const Vec& x0, const SolverConfig& cfg) {
  cfg.validate(p);
  if (x0.size() != static_cast<std::size_t>(p.nvars()))
    throw ValidationError("x0 must have nvars entries");
  if (!p.box().contains(x0)) throw ValidationError("x0 outside the open domain box");

  Vec f_ref = p.evaluate(p.reference_point());
  Vec f0 = p.evaluate(x0);
  if (!leq_componentwise(f0, f_ref))
    throw ValidationError("infeasible x0: F(x0) must not exceed F(reference_point)");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  Trace trace;
  IterateRecord rec0;
  rec0.k = 0;
  rec0.x = x0;
  rec0.F_of_x = f0;
  rec0.lambda_k = nan;
  rec0.step_norm = nan;
  rec0.inner_iterations = -1;
  rec0.stationarity = nan;
  rec0.criticality_residual = criticality_residual(p, x0, cfg.eps_active).residual;
  trace.records.push_back(std::move(rec0));

  Vec x = x0;
  trace.status = SolveStatus::max_iterations;
  for (int k = 0; k < cfg.max_outer; ++k) {
    double lambda = cfg.lambda_at(k);
    Vec e = cfg.e_at(k);
    validate_step_params(p, cfg, lambda, e);

    ProxInstance inst(p, x, lambda, e);
    ProxStepResult step = solve_inner(inst, cfg.tol_inner, cfg.max_inner);
    if (!step.converged)
      throw SolveError("inner solve did not reach tolerance (stationarity " +
                           std::to_string(step.final_stationarity) + ")",
                       k);

    double step_norm = dist(step.next, x);
    x = step.next;

    IterateRecord rec;
    rec.k = k + 1;
    rec.x = x;
    rec.F_of_x = p.evaluate(x);
    rec.lambda_k = lambda;
    rec.e_k = std::move(e);
    rec.z_k = step.weights_z;
    rec.step_norm = step_norm;
    rec.inner_iterations = step.inner_iterations;
    rec.stationarity = step.final_stationarity;
    rec.criticality_residual = criticality_residual(p, x, cfg.eps_active).residual;
    trace.records.push_back(std::move(rec));

    if (step_norm <= cfg.tol_outer) {
      trace.status = SolveStatus::converged;
      break;
    }
  }
  trace.final_point = x;
  return trace;
}

std::optional<int> sublevel_entry(const Trace& t, double c) {
  for (const IterateRecord& rec : t.records) {
    bool inside = true;
    for (double fj : rec.F_of_x)
      if (fj > c) inside = false;
    if (inside) return rec.k;
  }
  return std::nullopt;
}

int monotone_violations(const Trace& t) {
  int count = 0;
  for (std::size_t k = 0; k + 1 < t.records.size(); ++k) {
    const Vec& a = t.records[k].F_of_x;
    const Vec& b = t.records[k + 1].F_of_x;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (b[j] > a[j] + 1e-10) ++count;
  }
  return count;
}

}  // namespace moprox
