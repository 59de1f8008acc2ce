#pragma once

// Acceptance checks for the simulator, each reported as one pass/fail line.

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace ballchain::acceptance {

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  std::uint64_t seed = 0;
  int parallel = 1;
  /// Names of criteria to run; empty runs all.
  std::vector<std::string> only;
};

std::vector<std::string> criterion_names();

/// Runs the criteria in order, calling `on_result` as each finishes.
std::vector<CriterionResult> run(const Options& options,
                                 const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  name: detail (1.2 s)"
std::string format_line(const CriterionResult& r);

}  // namespace ballchain::acceptance
