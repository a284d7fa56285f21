#include "moprox/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "moprox/driver.hpp"
#include "moprox/hull.hpp"
#include "moprox/numfmt.hpp"
#include "moprox/rng.hpp"
#include "moprox/subproblem.hpp"

namespace moprox {

bool VerifyReport::all_passed() const {
  for (const auto& s : suites)
    if (!s.passed()) return false;
  return true;
}

namespace {

std::string point_str(const Vec& x) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << repr_shortest(x[i]);
  }
  os << "]";
  return os.str();
}

void note_failure(SuiteResult& s, const std::string& msg) {
  ++s.failures;
  if (s.detail.empty()) s.detail = msg;
}

SuiteResult ad_gradient_suite(const Problem& p, int samples, Rng& rng) {
  SuiteResult s{"ad_gradient", 0, 0, ""};
  const Vec bound = p.evaluate(p.reference_point());
  for (int t = 0; t < samples; ++t) {
    auto x = sample_sublevel(p, bound, rng);
    if (!x) {
      note_failure(s, "sublevel sampling exhausted its attempt budget");
      ++s.checks;
      continue;
    }
    for (int j = 0; j < p.num_components(); ++j)
      for (std::size_t i = 0; i < p.component(j).pieces.size(); ++i) {
        ++s.checks;
        double err = fd_check(p.component(j).pieces[i].expr, *x, 1e-6);
        if (!(err <= 1e-6))
          note_failure(s, "gradient of " + p.component(j).name + "/" +
                              p.component(j).pieces[i].label + " off by " + repr_shortest(err) +
                              " at " + point_str(*x));
      }
  }
  return s;
}

SuiteResult lipschitz_suite(const Problem& p, int samples, Rng& rng) {
  SuiteResult s{"lipschitz_bounds", 0, 0, ""};
  const Vec bound = p.evaluate(p.reference_point());
  for (int t = 0; t < samples; ++t) {
    auto x = sample_sublevel(p, bound, rng);
    auto y = sample_sublevel(p, bound, rng);
    if (!x || !y) {
      note_failure(s, "sublevel sampling exhausted its attempt budget");
      ++s.checks;
      continue;
    }
    double step = dist(*x, *y);
    for (int j = 0; j < p.num_components(); ++j)
      for (std::size_t i = 0; i < p.component(j).pieces.size(); ++i) {
        ++s.checks;
        Vec gx = p.piece_gradient(j, static_cast<int>(i), *x);
        Vec gy = p.piece_gradient(j, static_cast<int>(i), *y);
        double lhs = dist(gx, gy);
        double L = p.component(j).pieces[i].lipschitz_grad;
        if (lhs > L * step * (1.0 + 1e-9) + 1e-12)
          note_failure(s, "secant slope " + repr_shortest(lhs / std::max(step, 1e-300)) +
                              " exceeds declared L=" + repr_shortest(L) + " for " +
                              p.component(j).name + "/" + p.component(j).pieces[i].label +
                              " between " + point_str(*x) + " and " + point_str(*y));
      }
  }
  return s;
}

// Generator scale shrinks and the grid coarsens as the simplex dimension
// grows, keeping the oracle's lattice resolution below the 2e-3 comparison
// band at a fixed flop budget.
struct HullDraw {
  std::vector<Vec> gens;
  int grid = 1;
};

HullDraw draw_hull_instance(Rng& rng, int r) {
  static const double scale[5] = {0.0, 1.0, 1.0, 0.5, 0.5};
  static const int grid[5] = {0, 1, 4000, 2000, 2000};
  int n = 1 + rng.below(3);
  HullDraw d;
  d.grid = grid[r];
  for (int i = 0; i < r; ++i) {
    Vec g(n);
    for (int c = 0; c < n; ++c) g[c] = rng.uniform(-scale[r], scale[r]);
    d.gens.push_back(std::move(g));
  }
  return d;
}

SuiteResult hull_oracle_suite(int samples, Rng& rng) {
  SuiteResult s{"hull_oracle", 0, 0, ""};
  int instances = std::min(samples, 200);
  for (int t = 0; t < instances; ++t) {
    int r = 1 + t % 4;
    HullDraw d = draw_hull_instance(rng, r);
    ++s.checks;
    MinNormResult res = min_norm_point(d.gens);
    Vec oracle = brute_force_min_norm(d.gens, d.grid);
    if (dist(res.point, oracle) > 2e-3) {
      note_failure(s, "min-norm point " + point_str(res.point) + " vs oracle " +
                          point_str(oracle) + " (instance " + std::to_string(t) + ")");
      continue;
    }
    if (res.norm > norm(oracle) + 1e-6) {
      note_failure(s, "min-norm value above oracle on instance " + std::to_string(t));
      continue;
    }
    double scale = 1.0;
    for (const Vec& g : d.gens) scale = std::max(scale, norm_sq(g));
    bool vi_ok = true;
    for (const Vec& g : d.gens)
      if (dot(res.point, g) < norm_sq(res.point) - 1e-8 * scale) vi_ok = false;
    double wsum = 0.0;
    Vec rebuilt(d.gens[0].size(), 0.0);
    for (std::size_t i = 0; i < d.gens.size(); ++i) {
      wsum += res.weights[i];
      if (res.weights[i] < -1e-12) vi_ok = false;
      rebuilt = add_scaled(rebuilt, res.weights[i], d.gens[i]);
    }
    if (std::fabs(wsum - 1.0) > 1e-9 || dist(rebuilt, res.point) > 1e-8 * std::sqrt(scale))
      vi_ok = false;
    if (!vi_ok)
      note_failure(s, "certificate violated on instance " + std::to_string(t));
  }
  return s;
}

SuiteResult strong_convexity_suite(const Problem& p, int samples, std::uint64_t seed) {
  SuiteResult s{"strong_convexity", 0, 0, ""};
  SolverConfig cfg = default_config(p);
  ProxInstance inst(p, p.reference_point(), cfg.lambda_constant, cfg.e_constant);
  s.checks = samples;
  s.failures = strong_convexity_violations(inst, samples, seed);
  if (s.failures > 0)
    s.detail = "secant inequality failed on " + std::to_string(s.failures) + " of " +
               std::to_string(samples) + " sampled chords (margin " +
               repr_shortest(inst.convexity_margin()) + ")";
  return s;
}

SuiteResult sublevel_convexity_suite(const Problem& p, int samples, Rng& rng) {
  SuiteResult s{"sublevel_convexity", 0, 0, ""};
  const Vec bound = p.evaluate(p.reference_point());
  for (int t = 0; t < samples; ++t) {
    ++s.checks;
    auto x = sample_sublevel(p, bound, rng);
    auto y = sample_sublevel(p, bound, rng);
    if (!x || !y) {
      note_failure(s, "sublevel sampling exhausted its attempt budget");
      continue;
    }
    Vec mid = add_scaled(*x, 1.0, *y);
    for (double& c : mid) c *= 0.5;
    try {
      Vec fm = p.evaluate(mid);
      for (int j = 0; j < p.num_components(); ++j)
        if (fm[j] > bound[j] + 1e-10) {
          note_failure(s, "midpoint of " + point_str(*x) + " and " + point_str(*y) +
                              " leaves the sublevel set in component " + p.component(j).name);
          break;
        }
    } catch (const DomainError&) {
      note_failure(s, "midpoint of two sublevel points left the domain");
    }
  }
  return s;
}

}  // namespace

VerifyReport run_verification(const Problem& p, int samples, std::uint64_t seed) {
  if (samples <= 0) throw ValidationError("samples must be positive");
  VerifyReport rep;
  {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 1);
    rep.suites.push_back(ad_gradient_suite(p, samples, rng));
  }
  {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 2);
    rep.suites.push_back(lipschitz_suite(p, samples, rng));
  }
  {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 3);
    rep.suites.push_back(hull_oracle_suite(samples, rng));
  }
  rep.suites.push_back(strong_convexity_suite(p, samples, seed * 0x9e3779b97f4a7c15ULL + 4));
  {
    Rng rng(seed * 0x9e3779b97f4a7c15ULL + 5);
    rep.suites.push_back(sublevel_convexity_suite(p, samples, rng));
  }
  return rep;
}

}  // namespace moprox
