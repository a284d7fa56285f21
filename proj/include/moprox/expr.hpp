#pragma once

#include <memory>
#include <string>

#include "moprox/errors.hpp"
#include "moprox/vec.hpp"

namespace moprox {

struct ExprNode;

/// Value and dense gradient of an expression at a point.
struct DualVector {
  double value = 0.0;
  Vec partials;
};

/// Immutable scalar expression in variables x1..xn.
///
/// Grammar (whitespace ignored):
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := ("-")? atom ("^" integer)?
///   atom   := number | ident | func "(" expr ")" | "(" expr ")"
///   func   := "ln"|"sqrt"|"exp"|"sin"|"cos"|"abs"
///
/// Gradients are exact (forward-mode duals, no finite differencing).
/// Domain violations (ln/sqrt of a non-positive value, division by zero,
/// abs at 0 when differentiating, non-finite results) throw DomainError
/// naming the offending node.
class Expression {
 public:
  static Expression parse(const std::string& text, int nvars);

  int nvars() const { return nvars_; }

  double eval(const Vec& x) const;
  DualVector eval_grad(const Vec& x) const;

  /// Round-trippable text form: parse(to_text()) evaluates identically.
  std::string to_text() const;

  /// True if any sub-expression is an abs() call (not C1 at kinks).
  bool uses_abs() const;

 private:
  Expression(std::shared_ptr<const ExprNode> root, int nvars);
  std::shared_ptr<const ExprNode> root_;
  int nvars_;
};

/// Max over coordinates of the mismatch between the exact gradient and a
/// central finite difference with step h. The mismatch is relative, except
/// that absolute differences below 1e-9 count as zero (finite differences
/// cannot certify less than round-off).
double fd_check(const Expression& e, const Vec& x, double h);

}  // namespace moprox
