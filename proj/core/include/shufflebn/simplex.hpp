#pragma once

#include <vector>

#include "shufflebn/types.hpp"

namespace shufflebn {

enum class LPStatus { optimal, infeasible, unbounded };

struct LPResult {
  LPStatus status = LPStatus::infeasible;
  double value = 0.0;
  Vector x;
};

// maximize c^T x subject to A x <= b, x >= 0.
// Dense two-phase tableau simplex; Bland's rule on both entering and leaving
// choices rules out cycling on the degenerate systems separability produces.
LPResult simplex_solve(const Matrix& A, const Vector& b, const Vector& c, double eps = 1e-9);

}  // namespace shufflebn
