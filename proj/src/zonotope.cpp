#include "stitforest/zonotope.hpp"

#include <cmath>

#include "stitforest/errors.hpp"

namespace stitforest {

Zonotope Zonotope::build(std::vector<Vec> directions, Vec weights) {
  if (directions.empty() || directions.size() != weights.size())
    throw DimensionMismatch("zonotope needs matching directions and weights");
  const std::size_t d = directions.front().size();
  for (const Vec& v : directions) {
    if (v.size() != d) throw DimensionMismatch("zonotope directions have mixed dimensions");
    if (std::abs(norm2(v) - 1.0) > 1e-12)
      throw DimensionMismatch("zonotope directions must be unit vectors");
  }
  for (double w : weights)
    if (!(w > 0.0)) throw DimensionMismatch("zonotope weights must be positive");
  return Zonotope{std::move(directions), std::move(weights)};
}

double zonotope_support(const Zonotope& z, std::span<const double> u) {
  if (u.size() != z.dim()) throw DimensionMismatch("support direction has wrong dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < z.directions.size(); ++i)
    s += z.weights[i] * std::abs(dot(u, z.directions[i]));
  return 0.5 * s;
}

namespace {

// Accumulates prod(weights) * |det| over all d-subsets, lexicographically.
double subset_volume(const Zonotope& z, std::vector<std::size_t>& picked, std::size_t next,
                     std::size_t d) {
  if (picked.size() == d) {
    Mat m(d, d);
    double wprod = 1.0;
    for (std::size_t r = 0; r < d; ++r) {
      wprod *= z.weights[picked[r]];
      for (std::size_t c = 0; c < d; ++c) m.at(r, c) = z.directions[picked[r]][c];
    }
    return wprod * abs_det(std::move(m));
  }
  double total = 0.0;
  for (std::size_t i = next; i + (d - picked.size()) <= z.directions.size(); ++i) {
    picked.push_back(i);
    total += subset_volume(z, picked, i + 1, d);
    picked.pop_back();
  }
  return total;
}

}  // namespace

double zonotope_volume(const Zonotope& z) {
  const std::size_t d = z.dim();
  if (z.directions.size() < d) throw DegenerateZonotope("fewer generators than dimensions");
  std::vector<std::size_t> picked;
  picked.reserve(d);
  const double vol = subset_volume(z, picked, 0, d);
  if (!(vol > 1e-300)) throw DegenerateZonotope("generators do not span the ambient space");
  return vol;
}

double box_intrinsic_volume(std::span<const double> sides, std::size_t j) {
  if (j > sides.size()) throw IndexOutOfRange("intrinsic volume index exceeds dimension");
  // e_k recursion: after processing each side s, e_k += s * e_{k-1}.
  Vec e(j + 1, 0.0);
  e[0] = 1.0;
  for (double s : sides)
    for (std::size_t k = std::min(j, e.size() - 1); k >= 1; --k) e[k] += s * e[k - 1];
  return e[j];
}

}  // namespace stitforest
