#pragma once

#include <string>
#include <vector>

namespace glv {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  double error = 0.0;
};

// Tensor-algebra checks against an explicit 2^k coefficient expansion:
// rotation action for k <= 5, tracelessness of the Q basis for k <= 12,
// recurrence against the direct formula and the 2 pi / k rotation identity.
std::vector<SelftestCheck> tensor_selftest();

} // namespace glv
