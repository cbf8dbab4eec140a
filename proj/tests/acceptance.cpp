#include <cstdlib>
#include <iostream>
#include <string>

#include "pbih/acceptance.hpp"
#include "pbih/grid.hpp"

int main(int argc, char** argv) {
  pbih::AcceptanceOptions options;
  options.workers = pbih::default_workers();
  if (argc > 1) options.filter = argv[1];
  int failed = 0;
  const auto outcomes = pbih::run_acceptance(options, [&](const pbih::CheckOutcome& o) {
    std::cout << pbih::format_outcome(o) << std::endl;
    failed += o.passed ? 0 : 1;
  });
  std::cout << outcomes.size() - failed << "/" << outcomes.size() << " criteria passed" << std::endl;
  return failed == 0 && !outcomes.empty() ? EXIT_SUCCESS : EXIT_FAILURE;
}
