#pragma once
// Randomized and exhaustive property suites over the core library.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace eqd::checks {

struct SuiteResult {
  std::string name;
  bool pass = false;
  int64_t cases = 0;
  int64_t violations = 0;
  std::string detail;
  double seconds = 0;
};

// Loomis-Whitney over all non-empty subsets of 3x3 plus random subsets of 4^3.
SuiteResult suite_isoperimetry(uint64_t seed, int64_t random_cases = 10000);
// Internal perimeter bound for X inside a rho-balanced R, rho <= 3, d in {2, 3}.
SuiteResult suite_internal_perimeter(uint64_t seed, int64_t cases = 10000);
// Capped augmenting-path search vs uncapped BFS on random 10x10 rects.
SuiteResult suite_short_aug(uint64_t seed, int64_t cases = 1000);
// Hall feasibility vs exhaustive enumeration on instances with <= 12 edges.
SuiteResult suite_hall(uint64_t seed, int64_t cases = 1000);
// Extendability oracle and its repair-based variant vs exhaustive search.
SuiteResult suite_extendability(uint64_t seed, int64_t cases = 1000);
// Small pipeline run commuting with base shifts.
SuiteResult suite_equivariance(uint64_t seed);

std::vector<std::string> suite_names();
// Throws ArgumentError for unknown names.
SuiteResult run_suite(const std::string& name, uint64_t seed);
nlohmann::json suite_json(const SuiteResult& r);

}  // namespace eqd::checks
