#pragma once

#include <string>
#include <vector>

namespace zovr {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Quick invariant checks on small instances; a few seconds at most.
std::vector<SelftestCheck> run_selftest();

}  // namespace zovr
