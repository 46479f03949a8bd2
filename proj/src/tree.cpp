#include "tagforest/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <string>

#include "tagforest/error.hpp"

namespace tagforest {
namespace {

std::string loc(std::size_t i) { return "node " + std::to_string(i); }

}  // namespace

ValidationReport validate_tree(std::span<const TreeNode> nodes, const TreeLimits& limits) {
  ValidationReport report;
  const auto n = nodes.size();
  if (n == 0) {
    report.add_error("tree", "empty node list");
    return report;
  }

  bool ids_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes[i].id != static_cast<NodeId>(i)) {
      report.add_error(loc(i), "id " + std::to_string(nodes[i].id) + " does not match position");
      ids_ok = false;
    }
  }
  if (!ids_ok) return report;

  auto in_range = [n](NodeId id) { return id >= 0 && static_cast<std::size_t>(id) < n; };

  bool refs_ok = true;
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = nodes[i];
    if (node.name.empty()) report.add_error(loc(i), "empty name");
    if (!node.parent) {
      roots.push_back(i);
    } else if (!in_range(*node.parent)) {
      report.add_error(loc(i), "parent " + std::to_string(*node.parent) + " out of range");
      refs_ok = false;
    } else if (static_cast<std::size_t>(*node.parent) == i) {
      report.add_error(loc(i), "node is its own parent");
      refs_ok = false;
    }
    std::set<NodeId> seen;
    for (NodeId c : node.children) {
      if (!in_range(c)) {
        report.add_error(loc(i), "child " + std::to_string(c) + " out of range");
        refs_ok = false;
      } else if (!seen.insert(c).second) {
        report.add_error(loc(i), "child " + std::to_string(c) + " listed twice");
        refs_ok = false;
      }
    }
  }

  if (roots.empty()) {
    report.add_error("tree", "no root (every node has a parent)");
  } else if (roots.size() > 1) {
    std::string ids;
    for (auto r : roots) ids += (ids.empty() ? "" : ",") + std::to_string(r);
    report.add_error("tree", "multiple roots: " + ids);
  }
  if (!refs_ok) return report;

  bool links_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (NodeId c : nodes[i].children) {
      const auto& child = nodes[static_cast<std::size_t>(c)];
      if (child.parent != static_cast<NodeId>(i)) {
        report.add_error(loc(i), "inconsistent link: lists child " + std::to_string(c) + " whose parent is " +
                                     (child.parent ? std::to_string(*child.parent) : std::string("absent")));
        links_ok = false;
      }
    }
    if (nodes[i].parent) {
      const auto& p = nodes[static_cast<std::size_t>(*nodes[i].parent)];
      if (std::find(p.children.begin(), p.children.end(), static_cast<NodeId>(i)) == p.children.end()) {
        report.add_error(loc(i), "inconsistent link: parent " + std::to_string(*nodes[i].parent) +
                                     " does not list this node as a child");
        links_ok = false;
      }
    }
  }
  if (!links_ok || roots.size() != 1) return report;

  // Breadth-first walk from the root; with consistent links every node with a
  // parent is reachable unless it sits on a cycle.
  std::vector<NodeId> order;
  order.reserve(n);
  std::vector<bool> visited(n, false);
  std::deque<NodeId> queue{static_cast<NodeId>(roots.front())};
  visited[roots.front()] = true;
  while (!queue.empty()) {
    NodeId id = queue.front();
    queue.pop_front();
    order.push_back(id);
    for (NodeId c : nodes[static_cast<std::size_t>(id)].children) {
      if (!visited[static_cast<std::size_t>(c)]) {
        visited[static_cast<std::size_t>(c)] = true;
        queue.push_back(c);
      }
    }
  }
  if (order.size() != n) {
    for (std::size_t i = 0; i < n; ++i)
      if (!visited[i]) report.add_error(loc(i), "unreachable from root (cycle)");
    return report;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (order[i] != static_cast<NodeId>(i)) {
      report.add_error("tree", "node ids are not in breadth-first order (position " + std::to_string(i) +
                                   " holds node " + std::to_string(order[i]) + ")");
      break;
    }
  }

  std::optional<std::size_t> dim;
  std::set<std::string> leaf_names;
  bool any_leaf = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = nodes[i];
    const int expected = node.parent ? nodes[static_cast<std::size_t>(*node.parent)].depth + 1 : 0;
    if (node.depth != expected) {
      report.add_error(loc(i), "depth " + std::to_string(node.depth) + " expected " + std::to_string(expected));
    }
    if (node.depth > limits.max_depth) {
      report.add_error(loc(i), "depth " + std::to_string(node.depth) + " exceeds limit " +
                                   std::to_string(limits.max_depth));
    }
    if (node.children.empty()) {
      any_leaf = true;
      if (!leaf_names.insert(node.name).second) report.add_error(loc(i), "duplicate leaf name '" + node.name + "'");
    }
    if (node.embedding) {
      if (!dim) dim = node.embedding->size();
      if (node.embedding->size() != *dim || node.embedding->empty()) {
        report.add_error(loc(i), "embedding dimension " + std::to_string(node.embedding->size()) +
                                     " differs from " + std::to_string(*dim));
      }
      if (!std::all_of(node.embedding->begin(), node.embedding->end(), [](double v) { return std::isfinite(v); }))
        report.add_error(loc(i), "non-finite embedding component");
    }
  }
  if (!any_leaf) report.add_error("tree", "no leaves");
  return report;
}

TagTree::TagTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  leaf_pos_.assign(nodes_.size(), -1);
  for (const auto& node : nodes_) {
    max_depth_ = std::max(max_depth_, node.depth);
    if (node.children.empty()) {
      leaf_pos_[static_cast<std::size_t>(node.id)] = static_cast<std::int64_t>(leaves_.size());
      leaves_.push_back(node.id);
      leaf_by_name_.emplace(node.name, node.id);
    }
  }
}

TagTree TagTree::from_nodes(std::vector<TreeNode> nodes, const TreeLimits& limits) {
  auto report = validate_tree(nodes, limits);
  if (report.has_errors()) throw InvalidTreeError(std::move(report));
  return TagTree(std::move(nodes));
}

TagTree TagTree::from_parent_links(std::vector<std::string> names,
                                   std::span<const std::optional<std::size_t>> parents,
                                   std::vector<std::optional<std::vector<double>>> embeddings,
                                   const TreeLimits& limits) {
  const auto n = names.size();
  if (parents.size() != n) throw InputError("parent list length differs from name list length");
  if (!embeddings.empty() && embeddings.size() != n)
    throw InputError("embedding list length differs from name list length");

  std::vector<std::vector<std::size_t>> kids(n);
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < n; ++i) {
    if (!parents[i]) {
      if (root) throw InputError("multiple roots in parent links");
      root = i;
    } else {
      if (*parents[i] >= n) throw InputError("parent link out of range at index " + std::to_string(i));
      kids[*parents[i]].push_back(i);
    }
  }
  if (!root) throw InputError("no root in parent links");

  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<NodeId> new_id(n, -1);
  std::deque<std::size_t> queue{*root};
  while (!queue.empty()) {
    auto i = queue.front();
    queue.pop_front();
    if (new_id[i] >= 0) throw InputError("cycle in parent links");
    new_id[i] = static_cast<NodeId>(order.size());
    order.push_back(i);
    for (auto c : kids[i]) queue.push_back(c);
  }
  if (order.size() != n) throw InputError("parent links contain a cycle or unreachable nodes");

  std::vector<TreeNode> nodes(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const auto i = order[pos];
    auto& node = nodes[pos];
    node.id = static_cast<NodeId>(pos);
    node.name = std::move(names[i]);
    if (parents[i]) {
      node.parent = new_id[*parents[i]];
      node.depth = nodes[static_cast<std::size_t>(*node.parent)].depth + 1;
    }
    for (auto c : kids[i]) node.children.push_back(new_id[c]);
    if (!embeddings.empty()) node.embedding = std::move(embeddings[i]);
  }
  return from_nodes(std::move(nodes), limits);
}

std::optional<std::size_t> TagTree::leaf_index(NodeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) return std::nullopt;
  auto pos = leaf_pos_[static_cast<std::size_t>(id)];
  if (pos < 0) return std::nullopt;
  return static_cast<std::size_t>(pos);
}

std::optional<NodeId> TagTree::find_leaf(std::string_view name) const {
  auto it = leaf_by_name_.find(std::string(name));
  if (it == leaf_by_name_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> TagTree::neighbors(NodeId id) const {
  const auto& n = node(id);
  std::vector<NodeId> out;
  out.reserve(n.children.size() + 1);
  if (n.parent) out.push_back(*n.parent);
  out.insert(out.end(), n.children.begin(), n.children.end());
  return out;
}

}  // namespace tagforest
