#pragma once

#include <string>
#include <vector>

namespace cesec::verify {

struct AcceptanceOptions {
  /// Reduced trial counts for a fast smoke run; thresholds are unchanged but
  /// runtime budgets and statistical power are not representative.
  bool quick = false;
  std::string artifact_dir = ".";  // where criterion 8/9 write their CSVs
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;  // 0 = no runtime budget
};

/// Runs every acceptance criterion, in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

/// "PASS [3] name (1.2 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace cesec::verify
