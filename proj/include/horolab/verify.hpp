#pragma once

// Property suites behind `horolab verify` and the numbered acceptance criteria.

#include <cstdint>
#include <string>
#include <vector>

namespace horolab {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  // runtime limit in seconds, 0 when none
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const;
  std::string to_json() const;
};

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  /// Directory for artifacts (the bounds suite writes bound_report.json / .csv); empty skips them.
  std::string out_dir;
};

/// core, weights, curves, bounds, obstructions.
const std::vector<std::string>& suite_names();

/// Throws ArgumentError for an unknown suite name.
SuiteResult run_suite(const std::string& name, const VerifyOptions& options = {});

constexpr int kCriterionCount = 12;

/// Acceptance criterion 1..12 with its pinned tolerances and runtime budget.
CheckResult run_criterion(int id, const VerifyOptions& options = {});

}  // namespace horolab
