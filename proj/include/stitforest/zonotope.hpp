#pragma once

#include <span>
#include <vector>

#include "stitforest/linalg.hpp"

namespace stitforest {

// Minkowski sum of the segments [-w_i v_i / 2, w_i v_i / 2]: the zonoid
// associated with a discrete even directional measure that puts mass w_i / 2
// on each of +-v_i.  Directions are unit, one per antipodal pair.
struct Zonotope {
  std::vector<Vec> directions;
  Vec weights;

  static Zonotope build(std::vector<Vec> directions, Vec weights);
  std::size_t dim() const { return directions.empty() ? 0 : directions.front().size(); }
};

// h(u) = (1/2) sum_i w_i |<u, v_i>|
double zonotope_support(const Zonotope& z, std::span<const double> u);

// sum over d-subsets J of prod_{i in J} w_i * |det of the J directions|.
// Throws DegenerateZonotope when the directions do not span.
double zonotope_volume(const Zonotope& z);

// j-th intrinsic volume of an axis box: the elementary symmetric polynomial
// e_j of the side lengths.  e_0 = 1.
double box_intrinsic_volume(std::span<const double> sides, std::size_t j);

}  // namespace stitforest
