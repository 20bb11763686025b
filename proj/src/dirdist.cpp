#include "stitforest/dirdist.hpp"

#include <cmath>

#include "stitforest/errors.hpp"

namespace stitforest {

DirectionalDistribution DirectionalDistribution::discrete(std::vector<Vec> directions,
                                                          Vec weights) {
  if (directions.empty() || directions.size() != weights.size())
    throw DimensionMismatch("directional distribution needs matching directions and weights");
  const std::size_t d = directions.front().size();
  if (d == 0) throw DimensionMismatch("directions must have positive dimension");
  for (Vec& v : directions) {
    if (v.size() != d) throw DimensionMismatch("directions have mixed dimensions");
    v = normalized(v);
  }
  for (std::size_t i = 0; i < directions.size(); ++i)
    for (std::size_t j = i + 1; j < directions.size(); ++j)
      if (std::abs(dot(directions[i], directions[j])) > 1.0 - 1e-12)
        throw DimensionMismatch("antipodal representatives must be pairwise non-parallel");

  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw DimensionMismatch("weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw DimensionMismatch("weights must sum to one within 1e-12");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    weights[i] /= total;
    acc += weights[i];
  }
  weights.back() = 1.0 - acc;  // exact unit sum by construction

  Mat dm(directions.size(), d);
  for (std::size_t i = 0; i < directions.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) dm.at(i, j) = directions[i][j];
  Vec sv = singular_values(dm);
  if (sv.size() < d || !(sv[d - 1] > 1e-9 * std::max(1.0, sv[0])))
    throw RankDeficient("directions do not span the ambient space");

  DirectionalDistribution out;
  out.kind_ = Kind::discrete;
  out.dim_ = d;
  out.directions_ = std::move(directions);
  out.weights_ = std::move(weights);
  return out;
}

DirectionalDistribution DirectionalDistribution::isotropic(std::size_t dim) {
  if (dim == 0) throw DimensionMismatch("directions must have positive dimension");
  DirectionalDistribution out;
  out.kind_ = Kind::isotropic;
  out.dim_ = dim;
  return out;
}

Zonotope DirectionalDistribution::zonoid() const {
  if (kind_ != Kind::discrete)
    throw UnsupportedDistribution("zonoid available only for discrete distributions");
  return Zonotope::build(directions_, weights_);
}

}  // namespace stitforest
