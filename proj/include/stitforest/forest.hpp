#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stitforest/dirdist.hpp"
#include "stitforest/mondrian.hpp"
#include "stitforest/rng.hpp"
#include "stitforest/tessellation.hpp"

namespace stitforest {

// Training data: covariate rows x (n by d) and responses y (length n).
struct Dataset {
  Mat x;
  Vec y;

  std::size_t size() const { return x.rows; }
  std::size_t dim() const { return x.cols; }

  // n >= 1, shapes consistent, every entry finite.
  void validate() const;

  // CSV layout: one header row, d covariate columns, then the label column.
  static Dataset from_csv(const std::string& path);
  void to_csv(const std::string& path) const;
};

// Partition sampler configuration.  Tessellations are drawn without looking
// at labels, so routing never consumes randomness.
struct SamplerSpec {
  enum class Kind { mondrian, stit, oblique };

  Kind kind = Kind::mondrian;
  double lifetime = 1.0;
  Vec weights;                                        // mondrian; empty = uniform 1/d
  std::optional<DirectionalDistribution> directions;  // stit
  std::optional<Mat> feature_matrix;                  // oblique columns a_i, d by m
  double padding_factor = 3.0;                        // oblique lifted-window pad
  std::optional<AxisBox> window;                      // fixed covariate window
  double margin = 1e-6;                               // relative bbox padding
};

// Fills in defaults against the data: the window becomes the covariate
// bounding box padded by margin * max(side, 1) per axis when absent, and
// empty mondrian weights become 1/d.  Validates kind-specific fields and that
// the window covers every training row.  Idempotent.
SamplerSpec resolve_sampler(const SamplerSpec& spec, const Dataset& data);

// A drawn partition before any data is routed: tessellations never consult
// labels.  Lifted (oblique) trees live in feature space and carry the d by m
// transform.
struct Partition {
  TessellationTree tree;
  std::optional<Mat> lift;
};

// Draws the partition of a spec whose window is already set (ConfigError
// otherwise).  Empty mondrian weights default to 1/d here too.
Partition sample_partition(const SamplerSpec& spec, Rng& rng);

// One fitted randomized tree: a tessellation plus per-leaf label aggregates.
// Lifted (oblique) trees live in feature space R^m and carry the d by m
// transform used for routing.
class TreeEstimator {
 public:
  TreeEstimator(TessellationTree tree, std::optional<Mat> lift, AxisBox query_window,
                std::vector<std::int64_t> counts, Vec sums);

  // Leaf id containing x, after clamping x to the query window (and, for
  // lifted trees, the transformed point to the lifted window).  Sets
  // *clamped when any coordinate moved.
  int route(std::span<const double> x, bool* clamped = nullptr) const;

  // Leaf mean sum/count; exactly 0 on an empty leaf.
  double predict(std::span<const double> x, bool* clamped = nullptr) const;

  const TessellationTree& tree() const { return tree_; }
  const std::optional<Mat>& lift() const { return lift_; }
  const AxisBox& query_window() const { return query_window_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  const Vec& sums() const { return sums_; }
  std::size_t dim() const { return query_window_.dim(); }

 private:
  TessellationTree tree_;
  std::optional<Mat> lift_;
  AxisBox query_window_;
  AxisBox locate_box_;  // window of the tessellation itself, as a box
  std::vector<std::int64_t> counts_;
  Vec sums_;
};

TreeEstimator fit_tree(const Dataset& data, const SamplerSpec& spec, Rng& rng);

class ForestModel {
 public:
  ForestModel(std::vector<TreeEstimator> trees, SamplerSpec resolved, std::uint64_t seed);

  // Arithmetic mean of the tree predictions, accumulated in tree order.
  double predict(std::span<const double> x, bool* clamped = nullptr) const;

  const std::vector<TreeEstimator>& trees() const { return trees_; }
  const SamplerSpec& sampler() const { return sampler_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t dim() const { return trees_.front().dim(); }

  // Versioned JSON, written to a temp file and renamed into place.
  void save(const std::string& path) const;
  static ForestModel load(const std::string& path);

 private:
  std::vector<TreeEstimator> trees_;
  SamplerSpec sampler_;
  std::uint64_t seed_ = 0;
};

// Stream feeding the t-th tree of a forest fitted with `seed`.
Rng tree_stream(std::uint64_t seed, std::size_t tree_index);

// Fits n_trees independent trees from tree_stream(seed, t); results do not
// depend on the thread count.
ForestModel fit_forest(const Dataset& data, const SamplerSpec& spec, std::size_t n_trees,
                       std::uint64_t seed, unsigned threads = 1);

}  // namespace stitforest
