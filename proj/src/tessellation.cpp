#include "stitforest/tessellation.hpp"

#include <cmath>

#include "stitforest/errors.hpp"

namespace stitforest {

using nlohmann::json;

TessellationTree::TessellationTree(HPolytope window, double lifetime,
                                   std::vector<SplitNode> nodes)
    : window_(std::move(window)), lifetime_(lifetime), nodes_(std::move(nodes)) {
  if (!(lifetime_ > 0.0)) throw DimensionMismatch("tessellation lifetime must be positive");
  if (nodes_.empty()) throw DimensionMismatch("tessellation needs at least the root node");
  const int n = static_cast<int>(nodes_.size());
  parent_.assign(nodes_.size(), -1);
  leaf_node_.clear();
  leaf_count_ = 0;

  std::vector<int> stack{0};
  std::vector<char> seen(nodes_.size(), 0);
  seen[0] = 1;
  int visited = 0;
  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    ++visited;
    SplitNode& node = nodes_[static_cast<std::size_t>(idx)];
    if (node.is_leaf()) {
      if (node.upper >= 0) throw DimensionMismatch("leaf with a single child");
      node.leaf_id = leaf_count_++;
      leaf_node_.push_back(idx);
      continue;
    }
    if (node.lower >= n || node.upper < 0 || node.upper >= n || node.lower == node.upper)
      throw DimensionMismatch("tessellation child indices are invalid");
    if (seen[static_cast<std::size_t>(node.lower)] || seen[static_cast<std::size_t>(node.upper)])
      throw DimensionMismatch("tessellation nodes form a cycle or shared child");
    if (node.plane.normal.size() != window_.dim())
      throw DimensionMismatch("split plane has wrong dimension");
    if (std::abs(norm2(node.plane.normal) - 1.0) > 1e-9)
      throw DimensionMismatch("split normals must be unit vectors");
    if (!(node.birth_time >= 0.0) || !(node.birth_time < lifetime_))
      throw DimensionMismatch("split birth time outside [0, lifetime)");
    const int p_idx = idx;
    for (int child : {node.lower, node.upper}) {
      parent_[static_cast<std::size_t>(child)] = p_idx;
      seen[static_cast<std::size_t>(child)] = 1;
      const SplitNode& c = nodes_[static_cast<std::size_t>(child)];
      if (!c.is_leaf() && !(c.birth_time > node.birth_time))
        throw DimensionMismatch("birth times must strictly increase along paths");
    }
    node.leaf_id = -1;
    // Lower pushed last so it is visited first: leaf ids follow preorder.
    stack.push_back(node.upper);
    stack.push_back(node.lower);
  }
  if (visited != n) throw DimensionMismatch("tessellation has unreachable nodes");
}

int TessellationTree::locate(std::span<const double> x) const {
  if (!window_.contains(x)) throw OutOfWindow("query point is outside the window");
  const SplitNode* node = &nodes_[0];
  while (!node->is_leaf()) {
    const double s = dot(node->plane.normal, x) - node->plane.offset;
    node = &nodes_[static_cast<std::size_t>(s >= 0.0 ? node->upper : node->lower)];
  }
  return node->leaf_id;
}

HPolytope TessellationTree::cell(int leaf_id) const {
  if (leaf_id < 0 || leaf_id >= leaf_count_) throw IndexOutOfRange("leaf id out of range");
  std::vector<Halfspace> faces = window_.faces();
  int cur = leaf_node_[static_cast<std::size_t>(leaf_id)];
  while (parent_[static_cast<std::size_t>(cur)] >= 0) {
    const int p = parent_[static_cast<std::size_t>(cur)];
    const SplitNode& node = nodes_[static_cast<std::size_t>(p)];
    if (node.lower == cur) {
      faces.push_back({node.plane.normal, node.plane.offset});
    } else {
      Vec neg = node.plane.normal;
      scale(neg, -1.0);
      faces.push_back({std::move(neg), -node.plane.offset});
    }
    cur = p;
  }
  return HPolytope::build(window_.dim(), std::move(faces), 0.0);
}

HPolytope TessellationTree::zero_cell() const {
  const Vec origin(window_.dim(), 0.0);
  return cell(locate(origin));
}

json window_to_json(const HPolytope& window) {
  json faces = json::array();
  for (const Halfspace& f : window.faces())
    faces.push_back(json{{"normal", f.normal}, {"offset", f.offset}});
  return json{{"dim", window.dim()}, {"halfspaces", std::move(faces)}};
}

HPolytope window_from_json(const json& j) {
  const std::size_t dim = j.at("dim").get<std::size_t>();
  std::vector<Halfspace> faces;
  for (const json& f : j.at("halfspaces"))
    faces.push_back({f.at("normal").get<Vec>(), f.at("offset").get<double>()});
  return HPolytope::build(dim, std::move(faces));
}

json TessellationTree::to_json() const {
  json nodes = json::array();
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    const SplitNode& node = nodes_[static_cast<std::size_t>(idx)];
    if (node.is_leaf()) {
      nodes.push_back(json{{"leaf", node.leaf_id}});
      continue;
    }
    nodes.push_back(json{{"normal", node.plane.normal},
                         {"offset", node.plane.offset},
                         {"birth_time", node.birth_time}});
    stack.push_back(node.upper);
    stack.push_back(node.lower);
  }
  return json{{"format", "stitforest-tessellation"},
              {"version", 1},
              {"dim", window_.dim()},
              {"lifetime", lifetime_},
              {"window", window_to_json(window_)},
              {"nodes", std::move(nodes)}};
}

TessellationTree TessellationTree::from_json(const json& j) {
  if (j.value("format", "") != "stitforest-tessellation" || j.value("version", -1) != 1)
    throw SchemaVersionMismatch("unrecognized tessellation format or version");
  HPolytope window = window_from_json(j.at("window"));
  const double lifetime = j.at("lifetime").get<double>();
  const json& entries = j.at("nodes");

  std::vector<SplitNode> nodes(entries.size());
  std::size_t next = 0;
  // Preorder, lower subtree first; returns the index of the subtree root.
  auto read = [&](auto&& self) -> int {
    if (next >= entries.size()) throw SchemaVersionMismatch("tessellation node list truncated");
    const int idx = static_cast<int>(next);
    const json& e = entries[next++];
    SplitNode& node = nodes[static_cast<std::size_t>(idx)];
    if (e.contains("leaf")) return idx;
    node.plane.normal = e.at("normal").get<Vec>();
    node.plane.offset = e.at("offset").get<double>();
    node.birth_time = e.at("birth_time").get<double>();
    node.lower = self(self);
    node.upper = self(self);
    return idx;
  };
  read(read);
  if (next != entries.size()) throw SchemaVersionMismatch("tessellation node list has extra entries");
  return TessellationTree(std::move(window), lifetime, std::move(nodes));
}

}  // namespace stitforest
