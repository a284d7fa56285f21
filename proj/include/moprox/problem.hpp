#pragma once

#include <optional>
#include <string>
#include <vector>

#include "moprox/errors.hpp"
#include "moprox/expr.hpp"
#include "moprox/rng.hpp"
#include "moprox/vec.hpp"

namespace moprox {

/// One C1 branch of a max-structured objective.
struct SmoothPiece {
  Expression expr;
  double lipschitz_grad;  // Lipschitz constant of the gradient on the working region
  std::string label;
};

/// Objective f_j(x) = max over its pieces.
struct Component {
  std::string name;
  std::vector<SmoothPiece> pieces;
};

/// Open box (coordinates may be +/-inf); models the open convex domain.
struct DomainBox {
  Vec lower;
  Vec upper;
  bool contains(const Vec& x) const;
};

/// Pieces of one component attaining the max at x up to a tolerance.
struct ActiveSet {
  int component = 0;
  std::vector<int> pieces;
  double tolerance = 0.0;
};

/// Gradient of one epsilon-active piece, tagged by its origin.
struct PieceRef {
  int component = 0;
  int piece = 0;
};

struct GradEntry {
  int piece = 0;
  Vec gradient;
};

class Problem {
 public:
  Problem(std::string name, int nvars, DomainBox box, Vec reference_point,
          std::vector<Component> components);

  static Problem load(const std::string& path);
  static Problem from_json_text(const std::string& text);

  const std::string& name() const { return name_; }
  int nvars() const { return nvars_; }
  int num_components() const { return static_cast<int>(components_.size()); }
  const Component& component(int j) const { return components_[j]; }
  const DomainBox& box() const { return box_; }
  const Vec& reference_point() const { return reference_point_; }

  /// F(x); requires x strictly inside the box.
  Vec evaluate(const Vec& x) const;
  double component_value(int j, const Vec& x) const;
  double piece_value(int j, int i, const Vec& x) const;
  Vec piece_gradient(int j, int i, const Vec& x) const;

  /// Pieces i of component j with f_ij(x) >= f_j(x) - eps_act.
  ActiveSet active_pieces(int j, const Vec& x, double eps_act) const;

  /// Per-component gradients of the eps-active pieces; nullopt picks the
  /// default band 1e-6 * (1 + |f_j(x)|) per component.
  std::vector<std::vector<GradEntry>> clarke_generators(
      const Vec& x, std::optional<double> eps_act = std::nullopt) const;

  /// Componentwise F(x) <= bound (closed comparison).
  bool dominated_by(const Vec& x, const Vec& bound) const;

  double max_lipschitz(int j) const;

  static double default_eps_active(double fj) { return 1e-6 * (1.0 + std::fabs(fj)); }

 private:
  void check_in_box(const Vec& x) const;

  std::string name_;
  int nvars_;
  DomainBox box_;
  Vec reference_point_;
  std::vector<Component> components_;
};

/// Domain box with infinite bounds clipped around the reference point;
/// used to seed rejection sampling.
DomainBox sampling_bounds(const Problem& p);

/// Draws a point of S_F(F(reference_point)) by rejection from the clipped
/// box. Returns nullopt if max_attempts draws all miss.
std::optional<Vec> sample_sublevel(const Problem& p, const Vec& bound, Rng& rng,
                                   int max_attempts = 100000);

}  // namespace moprox
