// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

#include <iostream>

#include "acceptance.hpp"

int main() {
  const macmg::acceptance::Options options;
  int failed = 0;
  macmg::acceptance::run_all(options, [&](const macmg::acceptance::Criterion& c) {
    std::cout << macmg::acceptance::format_line(c) << std::endl;
    failed += !c.passed;
  });
  std::cout << (macmg::acceptance::kCriteriaCount - failed) << "/"
            << macmg::acceptance::kCriteriaCount << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
