#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tagforest/tree.hpp"

namespace tagforest {

struct TargetTolerance {
  double low = 0.999;
  double high = 1.001;
};

// Probability distribution Q over the leaves of a bound tree.
class TargetDistribution {
 public:
  // Validates keys (must be leaves), signs and total mass, then renormalizes
  // to sum exactly to 1. Throws InputError on any violation.
  static TargetDistribution from_leaf_weights(const TagTree& tree,
                                              std::span<const std::pair<NodeId, double>> weights,
                                              const TargetTolerance& tolerance = {});

  std::size_t leaf_count() const { return probs_.size(); }
  // Probability indexed by leaf column (see TagTree::leaf_index).
  double at_leaf_index(std::size_t leaf) const { return probs_[leaf]; }
  const std::vector<double>& probabilities() const { return probs_; }
  // Leaf columns with Q > 0, ascending.
  const std::vector<std::size_t>& support() const { return support_; }

 private:
  std::vector<double> probs_;
  std::vector<std::size_t> support_;
};

}  // namespace tagforest
