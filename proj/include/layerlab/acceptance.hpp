#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace layerlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

// Runs the eight acceptance criteria end to end, printing one pass/fail
// line per criterion. Tolerances are pinned in the implementation.
std::vector<CriterionResult> run_acceptance(std::ostream& os);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace layerlab
