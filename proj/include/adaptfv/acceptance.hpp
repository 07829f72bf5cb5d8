#pragma once

#include <string>
#include <vector>

namespace adaptfv
{

struct CriterionResult
{
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;
};

inline constexpr int num_criteria = 12;

CriterionResult run_criterion(int id);

// One line per criterion: `[PASS|FAIL] <id> <name> (<seconds>s / <budget>s): <detail>`.
std::string format_result(const CriterionResult &r);

}  // namespace adaptfv
