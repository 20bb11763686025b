#pragma once

#include <vector>

#include "stitforest/linalg.hpp"
#include "stitforest/zonotope.hpp"

namespace stitforest {

// Even probability measure on the sphere, represented by one unit vector per
// antipodal pair with positive weights summing to one.  The isotropic kind is
// a declared-but-unsampleable placeholder: samplers reject it.
class DirectionalDistribution {
 public:
  enum class Kind { discrete, isotropic };

  // Validates: unit representatives, pairwise non-parallel at 1e-12, weights
  // positive with |sum - 1| <= 1e-12 (then renormalized so the sum is exact),
  // and directions spanning the ambient space.
  static DirectionalDistribution discrete(std::vector<Vec> directions, Vec weights);

  static DirectionalDistribution isotropic(std::size_t dim);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return directions_.size(); }
  const std::vector<Vec>& directions() const { return directions_; }
  const Vec& weights() const { return weights_; }

  // The associated zonoid (segments weighted by the measure).
  Zonotope zonoid() const;

 private:
  Kind kind_ = Kind::discrete;
  std::size_t dim_ = 0;
  std::vector<Vec> directions_;
  Vec weights_;
};

}  // namespace stitforest
