// Acceptance suite: one pass/fail line per criterion. Run with --quick to
// skip the slow checks (the bias batch and the desk-scale experiments).

#include <cstdio>
#include <cstring>
#include <string>

#include "savrl/verify.hpp"

int main(int argc, char** argv) {
  savrl::verify::AcceptOptions options;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) options.include_slow = false;
    if (std::strcmp(argv[i], "--out") == 0 && i + 1 < argc) options.work_dir = argv[++i];
  }
  const auto results = savrl::verify::run_acceptance(options);
  const int failures = savrl::verify::print_results(results);
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all %zu criteria passed\n", results.size());
  return 0;
}
