#include "stitforest/mondrian.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "stitforest/errors.hpp"
#include "stitforest/stats.hpp"

namespace stitforest {

namespace {

void validate_spec(std::size_t dim, const WeightedMondrianSpec& spec) {
  if (spec.weights.size() != dim) throw DimensionMismatch("weight count differs from dimension");
  for (double w : spec.weights)
    if (!(w > 0.0)) throw DimensionMismatch("mondrian weights must be positive");
  if (!(spec.lifetime > 0.0)) throw DimensionMismatch("lifetime must be positive");
}

}  // namespace

TessellationTree mondrian_sample(const AxisBox& box, const WeightedMondrianSpec& spec, Rng& rng) {
  const std::size_t d = box.dim();
  validate_spec(d, spec);

  struct Work {
    AxisBox cell;
    int node;
    double birth;
  };

  std::vector<SplitNode> nodes(1);
  std::vector<Work> stack;
  stack.push_back({box, 0, 0.0});

  Vec rates(d);
  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();

    double total = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      rates[i] = spec.weights[i] * w.cell.side(i);
      total += rates[i];
    }

    double t = w.birth;
    for (;;) {
      if (total < 1e-12) throw RateUnderflow("cell split rate below 1e-12");
      t += rng.exponential(total);
      if (t >= spec.lifetime) break;
      const std::size_t axis = rng.categorical(rates);
      const double cut = rng.uniform(w.cell.lo[axis], w.cell.hi[axis]);
      if (cut - w.cell.lo[axis] < kSliverTol || w.cell.hi[axis] - cut < kSliverTol)
        continue;  // sliver cut rejected, clock keeps running

      Vec normal(d, 0.0);
      normal[axis] = 1.0;
      const int lo = static_cast<int>(nodes.size());
      nodes.emplace_back();
      const int up = static_cast<int>(nodes.size());
      nodes.emplace_back();
      SplitNode& parent = nodes[static_cast<std::size_t>(w.node)];
      parent.plane = Hyperplane{std::move(normal), cut};
      parent.birth_time = t;
      parent.lower = lo;
      parent.upper = up;

      AxisBox lower = w.cell;
      lower.hi[axis] = cut;
      AxisBox upper = std::move(w.cell);
      upper.lo[axis] = cut;
      stack.push_back({std::move(upper), up, t});
      stack.push_back({std::move(lower), lo, t});
      break;
    }
  }
  return TessellationTree(box.as_polytope(), spec.lifetime, std::move(nodes));
}

AxisBox zero_cell_sample(const WeightedMondrianSpec& spec, Rng& rng) {
  const std::size_t d = spec.weights.size();
  validate_spec(d, spec);
  AxisBox cell{Vec(d, 0.0), Vec(d, 0.0)};
  for (std::size_t i = 0; i < d; ++i) {
    const double rate = spec.lifetime * spec.weights[i];
    cell.lo[i] = -rng.exponential(rate);
    cell.hi[i] = rng.exponential(rate);
  }
  return cell;
}

LeafCountPrediction expected_leaf_count(const AxisBox& box, const WeightedMondrianSpec& spec) {
  validate_spec(box.dim(), spec);
  LeafCountPrediction out;
  out.value = 1.0;
  out.exact = true;
  for (std::size_t i = 0; i < box.dim(); ++i) {
    const double s = box.side(i);
    out.value *= 1.0 + spec.lifetime * spec.weights[i] * s;
    if (std::abs(s - 1.0) > 1e-12) out.exact = false;
  }
  return out;
}

std::vector<AxisBox> leaf_boxes(const TessellationTree& tree) {
  auto bounds = tree.window().as_axis_box();
  if (!bounds) throw DimensionMismatch("leaf_boxes needs an axis-aligned window");
  const std::size_t d = tree.window().dim();

  std::vector<AxisBox> leaves(static_cast<std::size_t>(tree.leaf_count()));
  struct Work {
    AxisBox cell;
    int node;
  };
  std::vector<Work> stack;
  stack.push_back({AxisBox{std::move(bounds->first), std::move(bounds->second)}, 0});
  while (!stack.empty()) {
    Work w = std::move(stack.back());
    stack.pop_back();
    const SplitNode& node = tree.nodes()[static_cast<std::size_t>(w.node)];
    if (node.is_leaf()) {
      leaves[static_cast<std::size_t>(node.leaf_id)] = std::move(w.cell);
      continue;
    }
    std::size_t axis = d;
    for (std::size_t j = 0; j < d; ++j) {
      if (std::abs(std::abs(node.plane.normal[j]) - 1.0) <= 1e-12) {
        if (axis != d) throw DimensionMismatch("leaf_boxes needs axis-aligned splits");
        axis = j;
      } else if (std::abs(node.plane.normal[j]) > 1e-12) {
        throw DimensionMismatch("leaf_boxes needs axis-aligned splits");
      }
    }
    if (axis == d) throw DimensionMismatch("leaf_boxes needs axis-aligned splits");
    const double cut = node.plane.normal[axis] > 0 ? node.plane.offset : -node.plane.offset;
    AxisBox lower = w.cell;
    lower.hi[axis] = cut;
    AxisBox upper = std::move(w.cell);
    upper.lo[axis] = cut;
    // The normal may point either way; "lower" is the side <normal, x> <= t.
    if (node.plane.normal[axis] > 0) {
      stack.push_back({std::move(upper), node.upper});
      stack.push_back({std::move(lower), node.lower});
    } else {
      stack.push_back({std::move(upper), node.lower});
      stack.push_back({std::move(lower), node.upper});
    }
  }
  return leaves;
}

double projected_diameter_tail_bound(const Vec& weights, const std::vector<std::size_t>& subset,
                                     std::size_t k, double r) {
  if (subset.empty()) throw IndexOutOfRange("subset must be nonempty");
  double w_min = std::numeric_limits<double>::infinity();
  for (std::size_t i : subset) {
    if (i >= weights.size()) throw IndexOutOfRange("subset index exceeds dimension");
    w_min = std::min(w_min, weights[i]);
  }
  const std::size_t s = subset.size();
  // Erlang(2s, 1) tail moment evaluated at c = r * w_min, scaled by w_min^-k.
  return erlang_tail_moment(2 * s, k, r * w_min) / std::pow(w_min, static_cast<double>(k));
}

TailMomentCheck projected_zero_cell_diameter_stats(const Vec& weights,
                                                   const std::vector<std::size_t>& subset,
                                                   std::size_t k, double r,
                                                   std::size_t replicates, Rng& rng) {
  if (replicates < 2) throw DimensionMismatch("need at least two replicates");
  WeightedMondrianSpec unit{weights, 1.0};
  std::vector<double> vals(replicates);
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    const AxisBox cell = zero_cell_sample(unit, rng);
    double sq = 0.0;
    for (std::size_t i : subset) {
      if (i >= weights.size()) throw IndexOutOfRange("subset index exceeds dimension");
      const double side = cell.side(i);
      sq += side * side;
    }
    const double diam = std::sqrt(sq);
    vals[rep] = diam >= r ? std::pow(diam, static_cast<double>(k)) : 0.0;
  }
  TailMomentCheck out;
  out.estimate = mean(vals);
  out.stderr_ = stderr_of_mean(vals);
  out.bound = projected_diameter_tail_bound(weights, subset, k, r);
  out.pass = out.estimate <= out.bound + 3.0 * out.stderr_;
  return out;
}

}  // namespace stitforest
