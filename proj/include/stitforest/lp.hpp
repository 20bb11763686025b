#pragma once

#include "stitforest/linalg.hpp"

namespace stitforest {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  Vec x;
};

// maximize <c, x> subject to G x <= h, x free.
// Dense two-phase simplex with Bland's rule; terminates on every input.
// Pivot tolerance 1e-11, feasibility tolerance 1e-9.
LpResult lp_maximize(const Vec& c, const Mat& G, const Vec& h);

}  // namespace stitforest
