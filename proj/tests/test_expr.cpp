#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "moprox/expr.hpp"
#include "moprox/rng.hpp"

using moprox::DomainError;
using moprox::Expression;
using moprox::ParseError;
using moprox::Rng;
using moprox::Vec;

TEST_CASE("eval matches hand values") {
  Expression e = Expression::parse("x1*x1", 1);
  CHECK(e.eval({3.0}) == 9.0);
  CHECK(e.eval_grad({3.0}).partials[0] == 6.0);

  Expression lin = Expression::parse("2*x1 + 3*x2 - 1", 2);
  CHECK(lin.eval({1.0, 1.0}) == 4.0);

  Expression c = Expression::parse("4.25", 2);
  CHECK(c.eval({0.3, -7.0}) == 4.25);
  CHECK(c.eval_grad({0.3, -7.0}).partials[0] == 0.0);
  CHECK(c.eval_grad({0.3, -7.0}).partials[1] == 0.0);
}

TEST_CASE("AD against central differences on simple cases") {
  Expression sq = Expression::parse("x1*x1", 1);
  CHECK(moprox::fd_check(sq, {3.0}, 1e-5) <= 1e-8);

  Expression c = Expression::parse("7", 1);
  CHECK(moprox::fd_check(c, {0.2}, 1e-5) == 0.0);
}

TEST_CASE("AD on the shipped max pieces near a kink region") {
  const char* pieces[] = {
      "ln(x1) + 1/x1",
      "ln(x1) - 1/x1",
      "2*sqrt(x1) + 1/x1",
      "2*sqrt(x1) - 1/x1",
  };
  for (const char* text : pieces) {
    Expression e = Expression::parse(text, 1);
    CHECK(moprox::fd_check(e, {0.47}, 1e-6) <= 1e-6);
    CHECK(moprox::fd_check(e, {2.5}, 1e-6) <= 1e-6);
  }
}

TEST_CASE("gradient of a linear form is exact") {
  Expression e = Expression::parse("1.5*x1 - 0.25*x2 + 3", 2);
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    Vec x{rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
    auto g = e.eval_grad(x);
    CHECK(std::fabs(g.partials[0] - 1.5) <= 1e-12);
    CHECK(std::fabs(g.partials[1] + 0.25) <= 1e-12);
    CHECK(std::fabs(g.value - (1.5 * x[0] - 0.25 * x[1] + 3.0)) <= 1e-12);
  }
}

namespace {

// Random expression in the supported grammar. Depth-bounded; leaves are
// constants or variables. exp/ln/sqrt arguments are shifted through
// exp(...) of a bounded input or kept positive via x^2 + const so that
// evaluation on [-2, 2]^n stays in-domain.
std::string random_expr(Rng& rng, int nvars, int depth) {
  if (depth == 0 || rng.below(4) == 0) {
    if (rng.below(2) == 0) return "x" + std::to_string(1 + rng.below(nvars));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", rng.uniform(0.1, 3.0));
    return buf;
  }
  switch (rng.below(8)) {
    case 0: return "(" + random_expr(rng, nvars, depth - 1) + " + " + random_expr(rng, nvars, depth - 1) + ")";
    case 1: return "(" + random_expr(rng, nvars, depth - 1) + " - " + random_expr(rng, nvars, depth - 1) + ")";
    case 2: return "(" + random_expr(rng, nvars, depth - 1) + ")*(" + random_expr(rng, nvars, depth - 1) + ")";
    case 3: return "(" + random_expr(rng, nvars, depth - 1) + ")/(4 + x" + std::to_string(1 + rng.below(nvars)) + "^2)";
    case 4: return "sin(" + random_expr(rng, nvars, depth - 1) + ")";
    case 5: return "cos(" + random_expr(rng, nvars, depth - 1) + ")";
    case 6: return "ln(1 + (" + random_expr(rng, nvars, depth - 1) + ")^2)";
    default: return "sqrt(0.5 + (" + random_expr(rng, nvars, depth - 1) + ")^2)";
  }
}

}  // namespace

TEST_CASE("AD against central differences on random expressions") {
  Rng rng(20240917);
  int checked = 0;
  for (int t = 0; t < 120; ++t) {
    int nvars = 1 + rng.below(3);
    std::string text = random_expr(rng, nvars, 3);
    Expression e = Expression::parse(text, nvars);
    for (int p = 0; p < 5; ++p) {
      Vec x(nvars);
      for (double& xi : x) xi = rng.uniform(-2.0, 2.0);
      double worst;
      try {
        worst = moprox::fd_check(e, x, 1e-6);
      } catch (const DomainError&) {
        continue;  // grazed a singular value; the draw is discarded
      }
      INFO("expr: " << text);
      CHECK(worst <= 1e-6);
      ++checked;
    }
  }
  CHECK(checked > 400);
}

TEST_CASE("parse/print round trip is stable and value-preserving") {
  const char* cases[] = {
      "ln(x1) + 1/x1",
      "2*sqrt(x1) - 1/x1",
      "(x1 - 1)^2 + x2^2",
      "-x1^2 + 3*x2",
      "exp(sin(x1)*cos(x2))",
      "1/(1 + x1^2) - 0.5",
      "abs(x1 - 2)",
  };
  Rng rng(5);
  for (const char* text : cases) {
    Expression a = Expression::parse(text, 2);
    std::string printed = a.to_text();
    Expression b = Expression::parse(printed, 2);
    CHECK(b.to_text() == printed);
    for (int t = 0; t < 100; ++t) {
      Vec x{rng.uniform(0.3, 3.0), rng.uniform(0.3, 3.0)};
      CHECK(a.eval(x) == b.eval(x));
    }
  }
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(Expression::parse("x0", 2), ParseError);
  CHECK_THROWS_AS(Expression::parse("x3", 2), ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(x1)", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("x1^65", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("x1^-2", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("x1^", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("x1 +", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("(x1", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("x1 x2", 2), ParseError);
  CHECK_THROWS_AS(Expression::parse("ln x1", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("x1 @ 2", 1), ParseError);
  CHECK_THROWS_AS(Expression::parse("x1", 0), ParseError);

  // boundary exponent is accepted
  CHECK_NOTHROW(Expression::parse("x1^64", 1));
  CHECK(Expression::parse("x1^0", 1).eval({5.0}) == 1.0);
}

TEST_CASE("parse error carries the offending position") {
  try {
    Expression::parse("x1 + foo(x1)", 1);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
    CHECK(std::string(e.what()).find("foo") != std::string::npos);
  }
}

TEST_CASE("domain errors at evaluation time") {
  Expression ln = Expression::parse("ln(x1)", 1);
  CHECK_THROWS_AS(ln.eval({0.0}), DomainError);
  CHECK_THROWS_AS(ln.eval({-1.0}), DomainError);
  CHECK(ln.eval({1.0}) == 0.0);

  Expression root = Expression::parse("sqrt(x1)", 1);
  CHECK_THROWS_AS(root.eval({-0.5}), DomainError);
  CHECK(root.eval({0.0}) == 0.0);
  // value exists at 0 but the one-sided slope blows up
  CHECK_THROWS_AS(root.eval_grad({0.0}), DomainError);

  Expression inv = Expression::parse("1/x1", 1);
  CHECK_THROWS_AS(inv.eval({0.0}), DomainError);

  Expression mag = Expression::parse("abs(x1)", 1);
  CHECK(mag.eval({0.0}) == 0.0);
  CHECK_THROWS_AS(mag.eval_grad({0.0}), DomainError);
  CHECK(mag.eval_grad({-2.0}).partials[0] == -1.0);

  Expression big = Expression::parse("exp(x1)", 1);
  CHECK_THROWS_AS(big.eval({1000.0}), DomainError);  // overflow to inf
}

TEST_CASE("point validation") {
  Expression e = Expression::parse("x1 + x2", 2);
  CHECK_THROWS_AS(e.eval({1.0}), DomainError);
  CHECK_THROWS_AS(e.eval({1.0, 2.0, 3.0}), DomainError);
  CHECK_THROWS_AS(e.eval({1.0, std::nan("")}), DomainError);
  CHECK_THROWS_AS(e.eval_grad({std::numeric_limits<double>::infinity(), 0.0}), DomainError);
}

TEST_CASE("uses_abs flags abs anywhere in the tree") {
  CHECK(Expression::parse("abs(x1 - 2) + x2", 2).uses_abs());
  CHECK(Expression::parse("sin(1 + abs(x1))", 1).uses_abs());
  CHECK(!Expression::parse("x1^2 + ln(x2)", 2).uses_abs());
}
