#pragma once

// Small trees shared by the unit tests.

#include <optional>
#include <string>
#include <vector>

#include "tagforest/tree.hpp"

namespace tagforest::fixtures {

// r -> {l1, l2}
inline TagTree three_node() {
  std::vector<std::optional<std::size_t>> parents{std::nullopt, 0, 0};
  return TagTree::from_parent_links({"r", "l1", "l2"}, parents);
}

// r -> m -> l
inline TagTree chain() {
  std::vector<std::optional<std::size_t>> parents{std::nullopt, 0, 1};
  return TagTree::from_parent_links({"r", "m", "l"}, parents);
}

inline TagTree single() {
  std::vector<std::optional<std::size_t>> parents{std::nullopt};
  return TagTree::from_parent_links({"only"}, parents);
}

inline TagTree star(std::size_t k) {
  std::vector<std::string> names{"root"};
  std::vector<std::optional<std::size_t>> parents{std::nullopt};
  for (std::size_t i = 0; i < k; ++i) {
    names.push_back("leaf" + std::to_string(i));
    parents.emplace_back(0);
  }
  return TagTree::from_parent_links(std::move(names), parents);
}

}  // namespace tagforest::fixtures
