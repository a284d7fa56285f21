#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "moprox/problem.hpp"

namespace moprox {

// One hypothesis-checking suite: `checks` attempted, `failures` of them bad.
// `detail` carries a human-readable note about the first failure, if any.
struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  std::string detail;

  bool passed() const { return failures == 0 && checks > 0; }
};

struct VerifyReport {
  std::vector<SuiteResult> suites;

  bool all_passed() const;
};

// Runs every suite against the problem's working region. Deterministic for a
// fixed seed. Suites: analytic vs finite-difference gradients, declared
// Lipschitz constants against sampled secants, the min-norm solver against a
// brute-force oracle, the strong convexity probe for the default prox
// instance, and midpoint convexity of the initial sublevel set.
VerifyReport run_verification(const Problem& p, int samples, std::uint64_t seed);

}  // namespace moprox
