#pragma once

// Invariant and oracle checks at reduced scale, run by `rotorsim check` and
// by the acceptance binary.

#include <string>
#include <vector>

#include "rotor/execution.hpp"

namespace rotor {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // worst deviation found
  double limit = 0.0;
  std::string detail;
};

std::vector<CheckResult> run_property_checks(Execution exec = Execution::parallel);

}  // namespace rotor
