#pragma once

#include <string>
#include <vector>

namespace tonelli {

struct CriterionResult {
  int number = 0;
  std::string name;
  bool pass = false;
  std::string details;  // worst observed margins, for the report table
  double seconds = 0;
};

inline constexpr int kCriterionCount = 11;

/// Run one acceptance criterion (1-based). Throws ConfigError out of range.
CriterionResult run_acceptance_criterion(int number);

/// Run a subset (empty = all), in order.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& numbers = {});

}  // namespace tonelli
