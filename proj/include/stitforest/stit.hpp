#pragma once

#include "stitforest/dirdist.hpp"
#include "stitforest/rng.hpp"
#include "stitforest/tessellation.hpp"

namespace stitforest {

// Samples the stable-under-iteration tessellation of the window: each cell W
// dies at rate R(W) = sum_i w_i * width(W, u_i); on death a direction is
// picked proportional to w_i * width(W, u_i) and the cut offset is uniform
// over the cell's extent along it.  Per cell the draws are consumed in the
// fixed order (clock, direction, offset), so seed and window determine the
// tree.  Cuts that would leave a side thinner than kSliverTol are rejected
// and the cell's clock keeps running.
//
// Throws UnsupportedDistribution for non-discrete phi and RateUnderflow when
// a cell's total rate falls below 1e-12.
TessellationTree stit_sample(const HPolytope& window, const DirectionalDistribution& phi,
                             double lifetime, Rng& rng);

struct ScalingCheck {
  double mean_scaled = 0.0;    // leaf counts of Y(lambda) on [0,1]^d
  double mean_unit = 0.0;      // leaf counts of Y(1) on [0,lambda]^d
  double var_scaled = 0.0;
  double var_unit = 0.0;
  double ks_stat = 0.0;
  double ks_critical = 0.0;
  std::size_t replicates = 0;
  bool pass = false;
};

// Self-similarity in law: lambda * Y(lambda) equals Y(1), so leaf counts of
// Y(lambda) on the unit cube and of Y(1) on [0,lambda]^d share a law.
// Two-sample Kolmogorov-Smirnov comparison at the given level.
ScalingCheck scaling_check(const DirectionalDistribution& phi, double lifetime, std::size_t dim,
                           std::size_t replicates, double level, Rng& rng);

}  // namespace stitforest
