#include "moprox/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "moprox/hull.hpp"

namespace moprox {

ProxInstance::ProxInstance(const Problem& p, Vec center_in, double lambda_in, Vec weights_e_in)
    : problem(&p),
      center(std::move(center_in)),
      lambda(lambda_in),
      weights_e(std::move(weights_e_in)) {
  if (weights_e.size() != static_cast<std::size_t>(p.num_components()))
    throw ValidationError("weights_e must have one entry per component");
  for (double e : weights_e)
    if (!(e > 0.0)) throw ValidationError("weights_e entries must be positive");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ValidationError("lambda must be positive and finite");
  center_values = p.evaluate(center);
}

double ProxInstance::convexity_margin() const {
  double margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < problem->num_components(); ++j)
    margin = std::min(margin, lambda * weights_e[j] - problem->max_lipschitz(j));
  return margin;
}

namespace {

double quadratic_term(const ProxInstance& inst, const Vec& y) {
  return 0.5 * inst.lambda * [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      double d = y[i] - inst.center[i];
      s += d * d;
    }
    return s;
  }();
}

// Scaled piece gaps (f_ij(y) - f_j(center)) / e_j and their max.
double scaled_gaps(const ProxInstance& inst, const Vec& y,
                   std::vector<std::vector<double>>* gaps) {
  const Problem& p = *inst.problem;
  double m = -std::numeric_limits<double>::infinity();
  if (gaps) gaps->assign(p.num_components(), {});
  for (int j = 0; j < p.num_components(); ++j) {
    const auto& pieces = p.component(j).pieces;
    if (gaps) (*gaps)[j].resize(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      double g = (pieces[i].expr.eval(y) - inst.center_values[j]) / inst.weights_e[j];
      if (gaps) (*gaps)[j][i] = g;
      m = std::max(m, g);
    }
  }
  return m;
}

}  // namespace

double scalarized_value(const ProxInstance& inst, const Vec& y) {
  return scaled_gaps(inst, y, nullptr) + quadratic_term(inst, y);
}

ScalarizedEval scalarized_value_and_generators(const ProxInstance& inst, const Vec& y,
                                               std::optional<double> eps_act) {
  const Problem& p = *inst.problem;
  std::vector<std::vector<double>> gaps;
  double m = scaled_gaps(inst, y, &gaps);
  double eps = eps_act ? *eps_act : 1e-6 * (1.0 + std::fabs(m));
  if (eps < 0.0) throw ValidationError("eps_act must be nonnegative");

  ScalarizedEval out;
  out.value = m + quadratic_term(inst, y);
  for (int j = 0; j < p.num_components(); ++j) {
    for (std::size_t i = 0; i < gaps[j].size(); ++i) {
      if (gaps[j][i] < m - eps) continue;
      Vec g = p.piece_gradient(j, static_cast<int>(i), y);
      for (std::size_t d = 0; d < g.size(); ++d)
        g[d] = g[d] / inst.weights_e[j] + inst.lambda * (y[d] - inst.center[d]);
      out.generators.push_back(std::move(g));
      out.piece_tags.push_back(PieceRef{j, static_cast<int>(i)});
    }
  }
  return out;
}

namespace {

// Largest step along d keeping y + t*d strictly inside the box (+inf when
// unconstrained in that direction).
double box_step_limit(const DomainBox& box, const Vec& y, const Vec& d) {
  double t = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (d[i] > 0.0 && std::isfinite(box.upper[i]))
      t = std::min(t, 0.999 * (box.upper[i] - y[i]) / d[i]);
    else if (d[i] < 0.0 && std::isfinite(box.lower[i]))
      t = std::min(t, 0.999 * (box.lower[i] - y[i]) / d[i]);
  }
  return std::max(t, 0.0);
}

Vec recover_weights_z(const ProxInstance& inst, const MinNormResult& mnp,
                      const std::vector<PieceRef>& tags) {
  const int m = inst.problem->num_components();
  Vec z(m, 0.0);
  for (std::size_t a = 0; a < tags.size(); ++a)
    z[tags[a].component] += mnp.weights[a] / inst.weights_e[tags[a].component];
  double nz = norm(z);
  if (nz > 0.0)
    for (double& zi : z) zi /= nz;
  return z;
}

}  // namespace

ProxStepResult solve_inner(const ProxInstance& inst, double tol_inner, int max_inner) {
  return solve_inner(inst, tol_inner, max_inner, inst.center);
}

ProxStepResult solve_inner(const ProxInstance& inst, double tol_inner, int max_inner,
                           const Vec& start) {
  const Problem& p = *inst.problem;
  if (!p.box().contains(start)) throw DomainError("inner start outside the domain box");
  if (!(tol_inner > 0.0)) throw ValidationError("tol_inner must be positive");

  const double eps_cap = 1e-2;

  // Curvature upper bound for any piece of Phi along a ray; the exact line
  // minimum is then no nearer than 1/hmax in the unnormalized step variable.
  double hmax = inst.lambda;
  for (int j = 0; j < p.num_components(); ++j)
    hmax = std::max(hmax, inst.lambda + p.max_lipschitz(j) / inst.weights_e[j]);

  Vec y = start;
  std::optional<double> eps_override;  // engaged after stalls, reset on success

  ProxStepResult res;
  res.converged = false;
  MinNormResult last_mnp;
  std::vector<PieceRef> last_tags;

  int it = 0;
  for (;; ++it) {
    ScalarizedEval ev = scalarized_value_and_generators(inst, y, eps_override);
    last_mnp = min_norm_point(ev.generators);
    last_tags = ev.piece_tags;
    res.final_stationarity = last_mnp.norm;

    if (last_mnp.norm <= tol_inner) {
      res.converged = true;
      break;
    }
    if (it >= max_inner) break;

    const Vec d = scaled(last_mnp.point, -1.0);
    const double stat = last_mnp.norm;

    // One-sided derivative of Phi along d (max over eps-active pieces).
    // Line-search acceptance is driven by this sign, not by Phi values:
    // value differences near the line minimum drown in round-off long
    // before the gradients do, and Phi is convex along the ray, so any
    // point with nonpositive slope is a genuine decrease.
    auto slope_at = [&](double t) {
      ScalarizedEval et = scalarized_value_and_generators(inst, add_scaled(y, t, d),
                                                          eps_override);
      double s = -std::numeric_limits<double>::infinity();
      for (const Vec& g : et.generators) s = std::max(s, dot(g, d));
      return s;
    };

    const double tmax = box_step_limit(p.box(), y, d);
    double lo = 0.0;  // slope at 0 is <= -stat^2 by the min-norm certificate
    double hi = std::numeric_limits<double>::infinity();
    double t = std::min(1.0 / hmax, tmax);
    for (int evals = 0; evals < 300 && t > 0.0; ++evals) {
      double s;
      try {
        s = slope_at(t);
      } catch (const DomainError&) {
        s = std::numeric_limits<double>::infinity();
      }
      if (s < 0.0) {
        lo = t;
        if (std::fabs(s) <= 0.25 * tol_inner * stat) break;
        if (t >= tmax) break;
        t = std::isinf(hi) ? std::min(2.0 * t, tmax) : 0.5 * (lo + hi);
      } else {
        hi = t;
        t = 0.5 * (lo + hi);
      }
      if (!std::isinf(hi) && hi - lo <= 1e-15 * hi) break;
    }

    if (lo > 0.0 && lo * stat > 1e-15 * (1.0 + norm(y))) {
      y = add_scaled(y, lo, d);
      eps_override.reset();
    } else {
      double cur = eps_override.value_or(1e-6 * (1.0 + std::fabs(scalarized_value(inst, y))));
      if (cur >= eps_cap) break;  // stuck
      eps_override = std::min(eps_cap, cur * 10.0);
    }
  }

  res.next = y;
  res.inner_iterations = it;
  res.weights_z = recover_weights_z(inst, last_mnp, last_tags);
  Vec f_next = p.evaluate(y);
  res.objective_gap_vector.resize(f_next.size());
  for (std::size_t j = 0; j < f_next.size(); ++j)
    res.objective_gap_vector[j] = inst.center_values[j] - f_next[j];
  return res;
}

int strong_convexity_violations(const ProxInstance& inst, int trials, std::uint64_t seed) {
  const Problem& p = *inst.problem;
  Rng rng(seed);
  Vec bound = p.evaluate(p.reference_point());
  const double nu = inst.convexity_margin() / 2.0;

  int violations = 0;
  for (int trial = 0; trial < trials; ++trial) {
    auto x = sample_sublevel(p, bound, rng);
    auto y = sample_sublevel(p, bound, rng);
    if (!x || !y) throw ValidationError("could not sample the working region");
    double t = rng.uniform01();
    Vec mid = add_scaled(scaled(*x, 1.0 - t), t, *y);
    if (!p.box().contains(mid)) continue;
    double lhs = scalarized_value(inst, mid);
    double rhs = (1.0 - t) * scalarized_value(inst, *x) + t * scalarized_value(inst, *y) -
                 nu * t * (1.0 - t) * norm_sq(sub(*x, *y));
    if (lhs > rhs + 1e-8) ++violations;
  }
  return violations;
}

bool strong_convexity_probe(const ProxInstance& inst, int trials, std::uint64_t seed) {
  return strong_convexity_violations(inst, trials, seed) == 0;
}

}  // namespace moprox
