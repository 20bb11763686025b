#pragma once

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "stitforest/geometry.hpp"

namespace stitforest {

// Binary split tree.  Internal nodes carry the cutting hyperplane and its
// absolute birth time; leaves carry a dense id assigned in preorder with the
// lower side visited first.
struct SplitNode {
  Hyperplane plane;
  double birth_time = 0.0;
  int lower = -1;
  int upper = -1;
  int leaf_id = -1;

  bool is_leaf() const { return lower < 0; }
};

class TessellationTree {
 public:
  // Validates the node graph: index 0 is the root, children are consistent,
  // birth times strictly increase along paths and stay below the lifetime.
  // Leaf ids are (re)assigned densely in preorder.
  TessellationTree(HPolytope window, double lifetime, std::vector<SplitNode> nodes);

  const HPolytope& window() const { return window_; }
  double lifetime() const { return lifetime_; }
  const std::vector<SplitNode>& nodes() const { return nodes_; }
  int leaf_count() const { return leaf_count_; }

  // Leaf id of the cell containing x.  Points on a cut plane go to the upper
  // side.  Throws OutOfWindow when x is not in the window (tolerance 1e-9).
  int locate(std::span<const double> x) const;

  // Reconstructs a leaf cell as window faces plus the path's split halfspaces.
  HPolytope cell(int leaf_id) const;

  // Cell containing the origin; the window must contain the origin.
  HPolytope zero_cell() const;

  nlohmann::json to_json() const;
  static TessellationTree from_json(const nlohmann::json& j);

 private:
  HPolytope window_;
  double lifetime_ = 0.0;
  std::vector<SplitNode> nodes_;
  std::vector<int> leaf_node_;    // leaf id -> node index
  std::vector<int> parent_;       // node index -> parent (-1 at root)
  int leaf_count_ = 0;
};

nlohmann::json window_to_json(const HPolytope& window);
HPolytope window_from_json(const nlohmann::json& j);

}  // namespace stitforest
