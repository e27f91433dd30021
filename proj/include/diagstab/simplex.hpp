#pragma once

#include <cstddef>
#include <vector>

namespace diagstab {

/// maximize c'x  subject to  A x <= b,  x >= 0.
/// b may have negative entries; feasibility is then decided by phase 1.
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<std::vector<double>> constraint;  // each of size num_vars
  std::vector<double> rhs;
  std::vector<double> objective;  // empty means pure feasibility check
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

/// Dense two-phase tableau simplex. Pivoting uses Dantzig's rule and switches
/// permanently to Bland's rule after a run of degenerate pivots, which rules
/// out cycling. Throws LpFailure if the pivot budget is exhausted.
LpSolution solve_lp(const LpProblem& problem);

}  // namespace diagstab
