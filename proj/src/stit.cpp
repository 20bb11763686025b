#include "stitforest/stit.hpp"

#include <cmath>
#include <utility>

#include "stitforest/errors.hpp"
#include "stitforest/stats.hpp"

namespace stitforest {

TessellationTree stit_sample(const HPolytope& window, const DirectionalDistribution& phi,
                             double lifetime, Rng& rng) {
  if (phi.kind() != DirectionalDistribution::Kind::discrete)
    throw UnsupportedDistribution("only discrete directional distributions can be sampled");
  if (phi.dim() != window.dim())
    throw DimensionMismatch("directional distribution dimension differs from window");
  if (!(lifetime > 0.0)) throw DimensionMismatch("lifetime must be positive");

  const std::size_t m = phi.size();
  const std::vector<Vec>& dirs = phi.directions();
  const Vec& weights = phi.weights();

  struct Work {
    HPolytope cell;
    int node;
    double birth;
  };

  std::vector<SplitNode> nodes(1);
  std::vector<Work> stack;
  stack.push_back({window, 0, 0.0});

  Vec h_plus(m), h_minus(m), rates(m);
  Vec neg;
  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();

    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      h_plus[i] = w.cell.support(dirs[i]);
      neg = dirs[i];
      scale(neg, -1.0);
      h_minus[i] = w.cell.support(neg);
      rates[i] = weights[i] * (h_plus[i] + h_minus[i]);
      total += rates[i];
    }

    double t = w.birth;
    for (;;) {
      if (total < 1e-12) throw RateUnderflow("cell split rate below 1e-12");
      t += rng.exponential(total);
      if (t >= lifetime) break;  // cell survives to the end of its clock
      const std::size_t i = rng.categorical(rates);
      const double offset = rng.uniform(-h_minus[i], h_plus[i]);
      Hyperplane plane{dirs[i], offset};
      auto [lower, upper] = split(w.cell, plane);
      if (!lower || !upper) continue;  // sliver cut rejected, clock keeps running

      const int lo = static_cast<int>(nodes.size());
      nodes.emplace_back();
      const int up = static_cast<int>(nodes.size());
      nodes.emplace_back();
      SplitNode& parent = nodes[static_cast<std::size_t>(w.node)];
      parent.plane = std::move(plane);
      parent.birth_time = t;
      parent.lower = lo;
      parent.upper = up;
      stack.push_back({std::move(*upper), up, t});
      stack.push_back({std::move(*lower), lo, t});
      break;
    }
  }
  return TessellationTree(window, lifetime, std::move(nodes));
}

ScalingCheck scaling_check(const DirectionalDistribution& phi, double lifetime, std::size_t dim,
                           std::size_t replicates, double level, Rng& rng) {
  if (replicates < 2) throw DimensionMismatch("scaling check needs at least two replicates");
  const HPolytope unit_cube = HPolytope::box(Vec(dim, 0.0), Vec(dim, 1.0));
  const HPolytope scaled_cube = HPolytope::box(Vec(dim, 0.0), Vec(dim, lifetime));

  std::vector<double> counts_scaled(replicates), counts_unit(replicates);
  Rng rng_scaled = rng.child(1);
  Rng rng_unit = rng.child(2);
  for (std::size_t r = 0; r < replicates; ++r) {
    counts_scaled[r] =
        static_cast<double>(stit_sample(unit_cube, phi, lifetime, rng_scaled).leaf_count());
    counts_unit[r] =
        static_cast<double>(stit_sample(scaled_cube, phi, 1.0, rng_unit).leaf_count());
  }

  ScalingCheck out;
  out.replicates = replicates;
  out.mean_scaled = mean(counts_scaled);
  out.mean_unit = mean(counts_unit);
  out.var_scaled = sample_variance(counts_scaled);
  out.var_unit = sample_variance(counts_unit);
  out.ks_stat = ks_two_sample(counts_scaled, counts_unit);
  out.ks_critical = ks_two_sample_critical(level, replicates, replicates);
  out.pass = out.ks_stat < out.ks_critical;
  return out;
}

}  // namespace stitforest
