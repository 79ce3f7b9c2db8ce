#pragma once

#include <string>
#include <vector>

#include "savrl/mdp.hpp"
#include "savrl/sim.hpp"

namespace savrl::verify {

// Oracles used only by the verification and test suites. They deliberately
// avoid the library's solver/reward code paths.

// Finite-horizon optimal value by memoized enumeration over (state,
// remaining-steps); horizon 100 approximates the infinite-horizon value to
// well under 1e-3 for gamma <= 0.9 fixtures.
double enumerate_value(const TabularMDP& mdp, int state, int horizon);

// Straight-line evaluation of the global reward formula from the raw
// waiting/empty-travel/parked sets.
double reward_reference(const SimWorld& world);

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptOptions {
  // The slow checks: the 1000-run bias batch, the desk-scale learning-signal
  // experiment and the desk-scale report sweep.
  bool include_slow = true;
  std::string work_dir = "acceptance_out";
};

// Runs the acceptance checks and returns one result per criterion, in
// criterion order. Skipped slow checks are reported as passes with a
// "skipped" note only when include_slow is off.
std::vector<CheckResult> run_acceptance(const AcceptOptions& options);

// Prints one pass/fail line per criterion; returns the number of failures.
int print_results(const std::vector<CheckResult>& results);

}  // namespace savrl::verify
