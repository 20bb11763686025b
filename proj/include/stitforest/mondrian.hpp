#pragma once

#include <vector>

#include "stitforest/rng.hpp"
#include "stitforest/tessellation.hpp"

namespace stitforest {

struct AxisBox {
  Vec lo, hi;

  std::size_t dim() const { return lo.size(); }
  double side(std::size_t i) const { return hi[i] - lo[i]; }
  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= side(i);
    return v;
  }
  bool contains(std::span<const double> x, double tol = 1e-9) const {
    for (std::size_t i = 0; i < dim(); ++i)
      if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
    return true;
  }
  HPolytope as_polytope() const { return HPolytope::box(lo, hi); }
};

struct WeightedMondrianSpec {
  Vec weights;  // positive per-axis rates, not necessarily normalized
  double lifetime = 1.0;
};

// Axis-aligned specialization of the general sampler: a box with sides s dies
// at rate sum_i w_i s_i, the split axis is picked proportional to w_i s_i and
// the cut is uniform along it.  No LP solves; draws per cell stay in the
// order (clock, axis, offset).
TessellationTree mondrian_sample(const AxisBox& box, const WeightedMondrianSpec& spec, Rng& rng);

// Direct draw from the distribution of the cell containing the origin in the
// infinite-volume tessellation: prod_i [-T1_i, T2_i] with T ~ Exp(lambda w_i).
AxisBox zero_cell_sample(const WeightedMondrianSpec& spec, Rng& rng);

struct LeafCountPrediction {
  double value = 0.0;
  // Exact on the unit cube; the general-box product formula is a derived
  // extension backed by Monte Carlo tests rather than a closed-form proof.
  bool exact = false;
};

// prod_i (1 + lambda * w_i * s_i)
LeafCountPrediction expected_leaf_count(const AxisBox& box, const WeightedMondrianSpec& spec);

// Leaf cells as boxes; requires every split plane to be axis-aligned and the
// window to be a box (true for mondrian_sample output).
std::vector<AxisBox> leaf_boxes(const TessellationTree& tree);

struct TailMomentCheck {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;
  bool pass = false;  // estimate <= bound + 3 stderr
};

// Monte Carlo E[D^k 1{D >= r}] for D the diameter of the zero cell projected
// onto the coordinate subset S, at unit lifetime, against the Erlang tail
// bound Gamma(2s+k) / (w_S^k Gamma(2s)) * sum_{n<2s+k} (r w_S)^n e^{-r w_S}/n!
// with w_S the smallest selected weight.
TailMomentCheck projected_zero_cell_diameter_stats(const Vec& weights,
                                                   const std::vector<std::size_t>& subset,
                                                   std::size_t k, double r,
                                                   std::size_t replicates, Rng& rng);

// The bound alone (no sampling).
double projected_diameter_tail_bound(const Vec& weights, const std::vector<std::size_t>& subset,
                                     std::size_t k, double r);

}  // namespace stitforest
