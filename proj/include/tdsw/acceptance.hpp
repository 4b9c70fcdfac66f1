#pragma once

#include <string>
#include <vector>

namespace tdsw::acceptance {

inline constexpr int kNumCriteria = 7;

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  double time_limit = 0.0;  // seconds; 0 = unlimited
  bool passed() const;
  // One-line summary of every check.
  std::string detail() const;
};

// jobs bounds the worker threads used inside a criterion.
CriterionResult run_criterion(int id, int jobs);
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids, int jobs);

}  // namespace tdsw::acceptance
