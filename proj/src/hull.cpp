#include "moprox/hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace moprox {

namespace {

void check_generators(const std::vector<Vec>& g) {
  if (g.empty()) throw ValidationError("min-norm point of an empty generator set");
  std::size_t n = g[0].size();
  if (n == 0) throw ValidationError("zero-dimensional generator");
  for (const Vec& v : g) {
    if (v.size() != n) throw ValidationError("generators of mixed dimension");
    for (double c : v)
      if (!std::isfinite(c)) throw ValidationError("non-finite generator entry");
  }
}

// Solves the bordered system [Gram 1; 1^T 0] [v; mu] = [0; 1], i.e. the
// norm minimizer over the affine hull of the columns in S.
// Returns false if the system is numerically singular.
bool affine_minimizer(const std::vector<Vec>& gens, const std::vector<int>& S, Vec& v) {
  int s = static_cast<int>(S.size());
  int dim = s + 1;
  std::vector<double> A(dim * dim, 0.0);
  std::vector<double> b(dim, 0.0);
  for (int a = 0; a < s; ++a)
    for (int c = a; c < s; ++c) {
      double q = dot(gens[S[a]], gens[S[c]]);
      A[a * dim + c] = q;
      A[c * dim + a] = q;
    }
  for (int a = 0; a < s; ++a) {
    A[a * dim + s] = 1.0;
    A[s * dim + a] = 1.0;
  }
  b[s] = 1.0;

  double scale = 1.0;
  for (int a = 0; a < s; ++a) scale = std::max(scale, A[a * dim + a]);

  // Gaussian elimination with partial pivoting.
  std::vector<int> piv(dim);
  for (int i = 0; i < dim; ++i) piv[i] = i;
  for (int col = 0; col < dim; ++col) {
    int best = col;
    for (int r = col + 1; r < dim; ++r)
      if (std::fabs(A[piv[r] * dim + col]) > std::fabs(A[piv[best] * dim + col])) best = r;
    std::swap(piv[col], piv[best]);
    double p = A[piv[col] * dim + col];
    if (std::fabs(p) < 1e-14 * scale) return false;
    for (int r = col + 1; r < dim; ++r) {
      double f = A[piv[r] * dim + col] / p;
      if (f == 0.0) continue;
      for (int c = col; c < dim; ++c) A[piv[r] * dim + c] -= f * A[piv[col] * dim + c];
      b[piv[r]] -= f * b[piv[col]];
    }
  }
  std::vector<double> sol(dim);
  for (int col = dim - 1; col >= 0; --col) {
    double acc = b[piv[col]];
    for (int c = col + 1; c < dim; ++c) acc -= A[piv[col] * dim + c] * sol[c];
    sol[col] = acc / A[piv[col] * dim + col];
  }
  v.assign(sol.begin(), sol.begin() + s);
  return true;
}

Vec combine(const std::vector<Vec>& gens, const std::vector<int>& S, const Vec& w) {
  Vec x(gens[0].size(), 0.0);
  for (std::size_t a = 0; a < S.size(); ++a)
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += w[a] * gens[S[a]][i];
  return x;
}

}  // namespace

MinNormResult min_norm_point(const std::vector<Vec>& generators) {
  check_generators(generators);
  const int r_in = static_cast<int>(generators.size());

  // Deduplicate: each input maps to the first generator within 1e-14.
  std::vector<Vec> gens;
  std::vector<int> rep(r_in);  // input index -> deduped index
  for (int i = 0; i < r_in; ++i) {
    double gi_scale = 1.0;
    for (double c : generators[i]) gi_scale = std::max(gi_scale, std::fabs(c));
    int found = -1;
    for (std::size_t k = 0; k < gens.size() && found < 0; ++k) {
      bool same = true;
      for (std::size_t d = 0; d < gens[k].size(); ++d)
        if (std::fabs(gens[k][d] - generators[i][d]) > 1e-14 * gi_scale) {
          same = false;
          break;
        }
      if (same) found = static_cast<int>(k);
    }
    if (found < 0) {
      gens.push_back(generators[i]);
      found = static_cast<int>(gens.size()) - 1;
    }
    rep[i] = found;
  }
  const int r = static_cast<int>(gens.size());

  double scale = 1.0;
  for (const Vec& g : gens) scale = std::max(scale, norm_sq(g));
  const double tol_vi = 1e-10 * scale;

  // Start at the generator of least norm, lowest index on ties.
  int start = 0;
  for (int i = 1; i < r; ++i)
    if (norm_sq(gens[i]) < norm_sq(gens[start])) start = i;

  std::vector<int> S{start};
  Vec w{1.0};
  Vec x = gens[start];

  const int max_major = 8 * r + 64;
  for (int major = 0; major < max_major; ++major) {
    // Most violated generator of the variational inequality.
    int t = 0;
    double best = dot(x, gens[0]);
    for (int i = 1; i < r; ++i) {
      double q = dot(x, gens[i]);
      if (q < best) {
        best = q;
        t = i;
      }
    }
    if (best >= norm_sq(x) - tol_vi) break;
    if (std::find(S.begin(), S.end(), t) != S.end()) break;
    double prev_sq = norm_sq(x);
    S.push_back(t);
    w.push_back(0.0);

    for (int minor = 0; minor < 8 * r + 64; ++minor) {
      Vec v;
      if (!affine_minimizer(gens, S, v)) {
        // Affinely dependent corral; drop the oldest zero-weight member.
        int drop = -1;
        for (std::size_t a = 0; a < S.size(); ++a)
          if (w[a] <= 1e-12) {
            drop = static_cast<int>(a);
            break;
          }
        if (drop < 0) break;
        S.erase(S.begin() + drop);
        w.erase(w.begin() + drop);
        continue;
      }
      bool interior = true;
      for (double vi : v)
        if (vi <= 1e-12) {
          interior = false;
          break;
        }
      if (interior) {
        w = v;
        break;
      }
      // Step from w toward v as far as nonnegativity allows, then
      // remove the members that hit zero.
      double theta = 1.0;
      for (std::size_t a = 0; a < S.size(); ++a)
        if (v[a] < 1e-12 && w[a] > v[a]) theta = std::min(theta, w[a] / (w[a] - v[a]));
      for (std::size_t a = 0; a < S.size(); ++a) w[a] = (1.0 - theta) * w[a] + theta * v[a];
      for (int a = static_cast<int>(S.size()) - 1; a >= 0; --a)
        if (w[a] <= 1e-12 && S.size() > 1) {
          S.erase(S.begin() + a);
          w.erase(w.begin() + a);
        }
    }
    x = combine(gens, S, w);
    if (norm_sq(x) >= prev_sq - 1e-16 * scale) break;  // numerical stagnation
  }

  // Clean up the weights and map them back to the input indexing.
  double wsum = 0.0;
  for (double& wa : w) {
    wa = std::max(wa, 0.0);
    wsum += wa;
  }
  MinNormResult res;
  res.weights.assign(r_in, 0.0);
  std::vector<double> dedup_w(r, 0.0);
  for (std::size_t a = 0; a < S.size(); ++a) dedup_w[S[a]] = w[a] / wsum;
  // first occurrence of each dedup group gets the group's weight
  {
    std::vector<bool> assigned(r, false);
    for (int i = 0; i < r_in; ++i) {
      int k = rep[i];
      if (!assigned[k]) {
        res.weights[i] = dedup_w[k];
        assigned[k] = true;
      }
    }
  }
  res.point = combine(gens, S, w);
  for (double& c : res.point) c /= wsum;
  res.norm = norm(res.point);
  return res;
}

Vec brute_force_min_norm(const std::vector<Vec>& generators, int grid_steps) {
  check_generators(generators);
  const int r = static_cast<int>(generators.size());
  if (r > 4) throw ValidationError("brute-force oracle limited to 4 generators");
  if (grid_steps < 1) throw ValidationError("grid_steps must be positive");
  const int n = static_cast<int>(generators[0].size());
  if (r == 1) return generators[0];

  const double h = 1.0 / grid_steps;
  double best_sq = std::numeric_limits<double>::infinity();
  Vec best(n, 0.0);
  Vec p(n, 0.0), q(n, 0.0), delta(n, 0.0);

  // Enumerates weight counts (k_0..k_{r-1}) summing to grid_steps. Along the
  // last fiber the squared norm is the exact quadratic s0 + 2k<q,d> + k^2|d|^2
  // in the trailing count k, so its grid minimum needs no sweep: it is one of
  // the two integers flanking the real minimizer, clamped to [0, rem].
  auto sweep_last_two = [&](const Vec& base, int rem, const Vec& ga, const Vec& gb) {
    double s0 = 0.0, qd = 0.0, dd = 0.0;
    for (int i = 0; i < n; ++i) {
      q[i] = base[i] + rem * h * gb[i];
      delta[i] = h * (ga[i] - gb[i]);
      s0 += q[i] * q[i];
      qd += q[i] * delta[i];
      dd += delta[i] * delta[i];
    }
    auto consider = [&](int k) {
      double s = s0 + k * (2.0 * qd + k * dd);
      if (s < best_sq) {
        best_sq = s;
        for (int i = 0; i < n; ++i) best[i] = q[i] + k * delta[i];
      }
    };
    if (dd <= 0.0) {
      consider(0);
      return;
    }
    int k = std::clamp(static_cast<int>(std::floor(-qd / dd)), 0, rem);
    consider(k);
    if (k + 1 <= rem) consider(k + 1);
  };

  if (r == 2) {
    sweep_last_two(p, grid_steps, generators[0], generators[1]);
  } else if (r == 3) {
    for (int k0 = 0; k0 <= grid_steps; ++k0) {
      for (int i = 0; i < n; ++i) p[i] = k0 * h * generators[0][i];
      sweep_last_two(p, grid_steps - k0, generators[1], generators[2]);
    }
  } else {
    Vec p2(n, 0.0);
    for (int k0 = 0; k0 <= grid_steps; ++k0) {
      for (int i = 0; i < n; ++i) p[i] = k0 * h * generators[0][i];
      for (int k1 = 0; k1 <= grid_steps - k0; ++k1) {
        for (int i = 0; i < n; ++i) p2[i] = p[i] + k1 * h * generators[1][i];
        sweep_last_two(p2, grid_steps - k0 - k1, generators[2], generators[3]);
      }
    }
  }
  return best;
}

}  // namespace moprox
