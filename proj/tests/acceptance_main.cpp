// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
#include "acceptance.hpp"

#include <iostream>

int main() {
  using namespace ballchain::acceptance;
  const auto results = run(Options{}, [](const CriterionResult& r) { std::cout << format_line(r) << std::endl; });
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
