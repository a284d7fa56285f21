#include "moprox/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "moprox/hull.hpp"

namespace moprox {

CriticalityCertificate criticality_residual(const Problem& p, const Vec& x,
                                            std::optional<double> eps_act) {
  auto per_component = p.clarke_generators(x, eps_act);

  std::vector<Vec> generators;
  std::vector<PieceRef> tags;
  for (int j = 0; j < p.num_components(); ++j)
    for (const GradEntry& e : per_component[j]) {
      generators.push_back(e.gradient);
      tags.push_back(PieceRef{j, e.piece});
    }

  MinNormResult mnp = min_norm_point(generators);

  CriticalityCertificate cert;
  cert.residual = mnp.norm;
  cert.hull_point = mnp.point;
  cert.weights = mnp.weights;
  cert.generator_tags = tags;

  if (mnp.norm > 1e-8) {
    Vec d = scaled(mnp.point, -1.0 / mnp.norm);
    cert.directional_upper_bounds.assign(p.num_components(),
                                         -std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < generators.size(); ++a) {
      double bound = dot(generators[a], d);
      int j = tags[a].component;
      cert.directional_upper_bounds[j] = std::max(cert.directional_upper_bounds[j], bound);
    }
    cert.descent_direction = std::move(d);
  }
  return cert;
}

bool is_critical(const Problem& p, const Vec& x, double tol) {
  if (!(tol >= 0.0)) throw ValidationError("tol must be nonnegative");
  return criticality_residual(p, x).residual <= tol;
}

bool smooth_case_check(const Problem& p, const Vec& x) {
  for (int j = 0; j < p.num_components(); ++j)
    if (p.component(j).pieces.size() != 1)
      throw ValidationError("smooth_case_check requires single-piece components");
  std::vector<Vec> gradients;
  for (int j = 0; j < p.num_components(); ++j) gradients.push_back(p.piece_gradient(j, 0, x));
  return min_norm_point(gradients).norm <= 1e-8;
}

namespace {

// Compositions of `steps` into `parts` nonnegative integers, scaled to the
// l1 simplex.
void simplex_grid(int parts, int steps, std::vector<Vec>& out) {
  Vec z(parts, 0.0);
  std::function<void(int, int)> rec = [&](int idx, int rem) {
    if (idx == parts - 1) {
      z[idx] = static_cast<double>(rem) / steps;
      out.push_back(z);
      return;
    }
    for (int k = 0; k <= rem; ++k) {
      z[idx] = static_cast<double>(k) / steps;
      rec(idx + 1, rem - k);
    }
  };
  rec(0, steps);
}

}  // namespace

MarginScanReport h3_margin_scan(const Problem& p, double c, const std::vector<Vec>& x_grid,
                                int z_grid_steps) {
  if (z_grid_steps < 1) throw ValidationError("z_grid_steps must be positive");
  const int m = p.num_components();
  const Vec upper = p.evaluate(p.reference_point());
  const Vec ce(m, c);

  std::vector<Vec> zs;
  simplex_grid(m, z_grid_steps, zs);

  MarginScanReport rep;
  rep.min_margin = std::numeric_limits<double>::infinity();

  Vec combo(p.nvars());
  for (const Vec& x : x_grid) {
    bool inside;
    try {
      inside = p.dominated_by(x, upper) && !p.dominated_by(x, ce);
    } catch (const DomainError&) {
      inside = false;
    }
    if (!inside) {
      ++rep.skipped;
      continue;
    }
    ++rep.samples;

    auto gens = p.clarke_generators(x);

    // min over gradient selections and z of |sum_j z_j g_j|
    std::vector<std::size_t> pick(m, 0);
    for (;;) {
      for (const Vec& z : zs) {
        std::fill(combo.begin(), combo.end(), 0.0);
        for (int j = 0; j < m; ++j) {
          const Vec& g = gens[j][pick[j]].gradient;
          for (int d = 0; d < p.nvars(); ++d) combo[d] += z[j] * g[d];
        }
        double margin = norm(combo);
        if (margin < rep.min_margin) {
          rep.min_margin = margin;
          rep.argmin_x = x;
          rep.argmin_z = z;
        }
      }
      int j = 0;
      while (j < m && ++pick[j] == gens[j].size()) pick[j++] = 0;
      if (j == m) break;
    }
  }

  if (rep.samples == 0)
    throw ValidationError("margin scan: no grid point lies in the target sublevel annulus");
  return rep;
}

}  // namespace moprox
