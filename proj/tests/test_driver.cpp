#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "moprox/driver.hpp"
#include "moprox/problem.hpp"
#include "test_util.hpp"

using moprox::Problem;
using moprox::SolveError;
using moprox::SolveStatus;
using moprox::SolverConfig;
using moprox::Trace;
using moprox::ValidationError;
using moprox::Vec;
using moprox::default_config;
using moprox::solve;

namespace {

Problem quad1d() {
  return Problem::from_json_text(R"({
    "name": "quad1d", "nvars": 1,
    "domain": {"lower": ["-inf"], "upper": ["inf"]},
    "reference_point": [0.0],
    "components": [{"name": "f", "pieces": [
      {"expr": "(x1 - 1)^2", "lipschitz_grad": 2.0}
    ]}]})");
}

void check_confinement(const Problem& p, const Trace& t) {
  Vec upper = p.evaluate(p.reference_point());
  for (const auto& rec : t.records)
    for (std::size_t j = 0; j < upper.size(); ++j)
      CHECK(rec.F_of_x[j] <= upper[j] + 1e-10);
}

}  // namespace

TEST_CASE("default config arithmetic") {
  Problem p = testutil::load_example31();
  SolverConfig cfg = default_config(p);
  CHECK(cfg.mu_bar == doctest::Approx(0.9 / std::sqrt(2.0)).epsilon(1e-15));
  REQUIRE(cfg.e_constant.size() == 2);
  CHECK(cfg.e_constant[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(cfg.lambda_constant == doctest::Approx(1.01 * 27.0 / cfg.mu_bar).epsilon(1e-15));
  CHECK(cfg.lambda_bar == 10.0 * cfg.lambda_constant);
  CHECK(cfg.tol_outer == 1e-8);
  CHECK(cfg.tol_inner == 1e-9);
  CHECK(cfg.max_outer == 1000);
  CHECK_NOTHROW(cfg.validate(p));

  Problem q = quad1d();
  SolverConfig c1 = default_config(q);
  CHECK(c1.mu_bar == 0.9);
  CHECK(c1.e_constant == Vec{1.0});
  CHECK(c1.lambda_constant == doctest::Approx(2.2444444444444445).epsilon(1e-15));
  CHECK_NOTHROW(c1.validate(q));
}

TEST_CASE("config validation rejects out-of-range parameters") {
  Problem p = testutil::load_example31();
  SolverConfig good = default_config(p);

  auto reject = [&](void (*tweak)(SolverConfig&)) {
    SolverConfig bad = good;
    tweak(bad);
    CHECK_THROWS_AS(bad.validate(p), ValidationError);
  };

  reject([](SolverConfig& c) { c.mu_bar = 0.0; });
  reject([](SolverConfig& c) { c.mu_bar = 1.0; });
  reject([](SolverConfig& c) { c.mu_bar = 1.2; });
  reject([](SolverConfig& c) { c.e_constant = {0.5, 0.5}; });       // not unit norm
  reject([](SolverConfig& c) { c.e_constant = {1.0, 0.0}; });       // e_2 <= mu_bar
  reject([](SolverConfig& c) { c.e_constant = {1.0}; });            // wrong arity
  reject([](SolverConfig& c) { c.lambda_constant = c.lambda_bar * 2.0; });
  reject([](SolverConfig& c) { c.lambda_constant = 40.0; });        // below 27 / mu_bar
  reject([](SolverConfig& c) { c.lambda_bar = 0.0; });
  reject([](SolverConfig& c) { c.tol_outer = 0.0; });
  reject([](SolverConfig& c) { c.tol_inner = -1e-9; });
  reject([](SolverConfig& c) { c.max_outer = 0; });
  reject([](SolverConfig& c) { c.max_inner = -1; });
  reject([](SolverConfig& c) { c.eps_active = -1e-6; });

  // the override skips only the Lipschitz threshold test
  SolverConfig forced = good;
  forced.lambda_constant = 40.0;
  forced.override_lambda_check = true;
  CHECK_NOTHROW(forced.validate(p));
  forced.lambda_constant = forced.lambda_bar * 2.0;
  CHECK_THROWS_AS(forced.validate(p), ValidationError);
}

TEST_CASE("solve drives the shipped problem to its known solution") {
  Problem p = testutil::load_example31();
  SolverConfig cfg = default_config(p);

  Trace t = solve(p, {2.5}, cfg);
  REQUIRE(t.status == SolveStatus::converged);
  CHECK(std::fabs(t.final_point[0] - 1.0) <= 1e-4);
  CHECK(t.records.size() > 2);
  CHECK(t.records.size() <= 1001);
  CHECK(moprox::monotone_violations(t) == 0);
  check_confinement(p, t);

  // leading record carries the start, not a step
  const auto& r0 = t.records[0];
  CHECK(r0.k == 0);
  CHECK(r0.x == Vec{2.5});
  CHECK(std::isnan(r0.lambda_k));
  CHECK(std::isnan(r0.step_norm));
  CHECK(std::isnan(r0.stationarity));
  CHECK(r0.inner_iterations == -1);
  CHECK(r0.criticality_residual > 0.0);

  const auto& last = t.records.back();
  CHECK(last.k == static_cast<int>(t.records.size()) - 1);
  CHECK(last.x == t.final_point);
  CHECK(last.step_norm <= cfg.tol_outer);
  CHECK(std::fabs(moprox::norm(last.z_k) - 1.0) <= 1e-10);
}

TEST_CASE("starting at the solution stops immediately") {
  Problem p = testutil::load_example31();
  Trace t = solve(p, {1.0}, default_config(p));
  REQUIRE(t.status == SolveStatus::converged);
  CHECK(t.final_point == Vec{1.0});
  CHECK(t.records.size() == 2);  // start plus the zero-length step
  CHECK(t.records[1].step_norm == 0.0);
}

TEST_CASE("solve finds an efficient point of the quadratic pair") {
  Problem q = testutil::load_quad2d();
  Trace t = solve(q, {0.0, 0.0}, default_config(q));
  REQUIRE(t.status == SolveStatus::converged);
  // the efficient set is the segment x1 + x2 = 1, 0 <= x1 <= 1
  CHECK(std::fabs(t.final_point[0] + t.final_point[1] - 1.0) <= 1e-6);
  CHECK(std::fabs(t.final_point[0] - t.final_point[1]) <= 1e-8);  // symmetric start
  CHECK(moprox::monotone_violations(t) == 0);
  check_confinement(q, t);
}

TEST_CASE("sublevel entry index and permanence") {
  Problem p = testutil::load_example31();
  Trace t = solve(p, {2.5}, default_config(p));
  REQUIRE(t.status == SolveStatus::converged);

  double c = p.component_value(1, {2.0});
  std::optional<int> entry = moprox::sublevel_entry(t, c);
  REQUIRE(entry.has_value());
  CHECK(*entry > 0);  // F(2.5) starts above c in the second component
  for (const auto& rec : t.records)
    if (rec.k >= *entry)
      for (double fj : rec.F_of_x) CHECK(fj <= c + 1e-10);

  CHECK(moprox::sublevel_entry(t, 1e9) == 0);
  CHECK(!moprox::sublevel_entry(t, -1e9).has_value());
}

TEST_CASE("solve validates the start point") {
  Problem p = testutil::load_example31();
  SolverConfig cfg = default_config(p);
  CHECK_THROWS_AS(solve(p, {2.5, 1.0}, cfg), ValidationError);
  CHECK_THROWS_AS(solve(p, {0.05}, cfg), ValidationError);  // outside the box
  // inside the box but above F(reference) in the first component
  CHECK_THROWS_AS(solve(p, {0.47}, cfg), ValidationError);
}

TEST_CASE("lambda below the threshold is refused unless overridden") {
  Problem q = quad1d();
  SolverConfig cfg = default_config(q);
  cfg.lambda_constant = 0.27;
  CHECK_THROWS_AS(solve(q, {0.5}, cfg), ValidationError);

  cfg.override_lambda_check = true;
  Trace t = solve(q, {0.5}, cfg);
  REQUIRE(t.status == SolveStatus::converged);
  CHECK(std::fabs(t.final_point[0] - 1.0) <= 1e-6);
  for (std::size_t k = 1; k < t.records.size(); ++k)
    CHECK(t.records[k].lambda_k == 0.27);
}

TEST_CASE("parameter sequences are applied per step and clamped") {
  Problem p = testutil::load_example31();
  SolverConfig cfg = default_config(p);
  cfg.lambda_sequence = {50.0, 45.0};

  Trace t = solve(p, {2.5}, cfg);
  REQUIRE(t.status == SolveStatus::converged);
  REQUIRE(t.records.size() > 4);
  CHECK(t.records[1].lambda_k == 50.0);
  CHECK(t.records[2].lambda_k == 45.0);
  CHECK(t.records[3].lambda_k == 45.0);  // clamped to the last entry
  CHECK(t.records.back().lambda_k == 45.0);
  CHECK(moprox::monotone_violations(t) == 0);
}

TEST_CASE("a sequence entry violating the thresholds aborts mid-run") {
  Problem p = testutil::load_example31();
  SolverConfig cfg = default_config(p);
  cfg.lambda_sequence = {50.0, 40.0};  // second entry below 27 / mu_bar
  CHECK_NOTHROW(cfg.validate(p));      // k = 0 looks fine
  CHECK_THROWS_AS(solve(p, {2.5}, cfg), ValidationError);
}

TEST_CASE("monotone violation counter flags a corrupted trace") {
  Trace t;
  t.status = SolveStatus::converged;
  moprox::IterateRecord a, b, c;
  a.k = 0;
  a.F_of_x = {1.0, 1.0};
  b.k = 1;
  b.F_of_x = {2.0, 0.5};  // first component went up
  c.k = 2;
  c.F_of_x = {2.0, 0.6};  // second component went up
  t.records = {a, b, c};
  CHECK(moprox::monotone_violations(t) == 2);

  Trace flat;
  flat.records = {a, a};
  CHECK(moprox::monotone_violations(flat) == 0);
}

TEST_CASE("status names") {
  CHECK(moprox::to_string(SolveStatus::converged) == "converged");
  CHECK(moprox::to_string(SolveStatus::max_iterations) == "max_iterations");
  CHECK(moprox::to_string(SolveStatus::error) == "error");
}

TEST_CASE("iteration budget surfaces as max_iterations") {
  Problem p = testutil::load_example31();
  SolverConfig cfg = default_config(p);
  cfg.max_outer = 3;
  Trace t = solve(p, {2.5}, cfg);
  CHECK(t.status == SolveStatus::max_iterations);
  CHECK(t.records.size() == 4);
  CHECK(t.final_point == t.records.back().x);
}
