#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tagforest/report.hpp"

namespace tagforest {

using NodeId = std::int32_t;

struct TreeNode {
  NodeId id = 0;
  std::string name;
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  int depth = 0;
  std::optional<std::vector<double>> embedding;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct TreeLimits {
  int max_depth = 64;
};

// Checks every structural invariant of a node list: dense ids matching
// positions, a single root, consistent parent/child links, no cycles, depth
// bookkeeping, canonical breadth-first numbering, a non-empty and uniquely
// named leaf set. An empty report means the nodes form a valid TagTree.
ValidationReport validate_tree(std::span<const TreeNode> nodes, const TreeLimits& limits = {});

// Immutable rooted tag taxonomy. Node ids are dense and breadth-first, the
// root is node 0, and leaves are ordered by ascending node id. Instances can
// only be created from node lists that pass validate_tree.
class TagTree {
 public:
  // Throws InvalidTreeError carrying the validation report.
  static TagTree from_nodes(std::vector<TreeNode> nodes, const TreeLimits& limits = {});

  // Builds a tree from arbitrary parent links (index-based, exactly one
  // nullopt for the root) and renumbers it breadth-first. Children keep the
  // relative order of their input indices. `embeddings` may be empty or hold
  // one optional vector per input node.
  static TagTree from_parent_links(std::vector<std::string> names,
                                   std::span<const std::optional<std::size_t>> parents,
                                   std::vector<std::optional<std::vector<double>>> embeddings = {},
                                   const TreeLimits& limits = {});

  std::size_t size() const { return nodes_.size(); }
  const TreeNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  NodeId root() const { return 0; }

  const std::vector<NodeId>& leaves() const { return leaves_; }
  std::size_t leaf_count() const { return leaves_.size(); }
  bool is_leaf(NodeId id) const { return leaf_pos_[static_cast<std::size_t>(id)] >= 0; }
  // Column index of a leaf in leaf-indexed vectors; nullopt for internal nodes.
  std::optional<std::size_t> leaf_index(NodeId id) const;
  std::optional<NodeId> find_leaf(std::string_view name) const;

  int max_depth() const { return max_depth_; }
  // Parent (if any) followed by children.
  std::vector<NodeId> neighbors(NodeId id) const;

  friend bool operator==(const TagTree& a, const TagTree& b) { return a.nodes_ == b.nodes_; }

 private:
  explicit TagTree(std::vector<TreeNode> nodes);

  std::vector<TreeNode> nodes_;
  std::vector<NodeId> leaves_;
  std::vector<std::int64_t> leaf_pos_;
  std::unordered_map<std::string, NodeId> leaf_by_name_;
  int max_depth_ = 0;
};

}  // namespace tagforest
