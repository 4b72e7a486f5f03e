#pragma once

#include <cstdint>
#include <vector>

#include "rhlqr/workbench.hpp"

namespace rhlqr {

struct VerifyOptions {
  int d = 0;      // 0: smallest admissible depth up to d_max
  int d_max = 4;
  int seeds = 5;  // random initial states / SPD pairs per check
  std::vector<int> horizons{1, 2, 4, 8};
  double tol_delta = 1e-12;
  std::uint64_t seed = 1;
};

/// Runs every invariant check on one problem: lifting consistency,
/// contraction, monotonicity, oracle equivalence, closed-loop stability,
/// the performance-loss bound and base/lifted cost agreement.
RunReport verify_problem(const ProblemData& pd, const VerifyOptions& opt = {});

}  // namespace rhlqr
