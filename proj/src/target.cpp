#include "tagforest/target.hpp"

#include <cmath>
#include <sstream>

#include "tagforest/error.hpp"

namespace tagforest {

TargetDistribution TargetDistribution::from_leaf_weights(const TagTree& tree,
                                                         std::span<const std::pair<NodeId, double>> weights,
                                                         const TargetTolerance& tolerance) {
  TargetDistribution q;
  q.probs_.assign(tree.leaf_count(), 0.0);
  std::vector<bool> seen(tree.leaf_count(), false);
  double total = 0.0;
  for (const auto& [id, w] : weights) {
    auto leaf = tree.leaf_index(id);
    if (!leaf) {
      const bool exists = id >= 0 && static_cast<std::size_t>(id) < tree.size();
      throw InputError("target key " + (exists ? "'" + tree.node(id).name + "'" : std::to_string(id)) +
                       " is not a leaf of the tree");
    }
    if (!std::isfinite(w) || w < 0.0) {
      throw InputError("target weight for '" + tree.node(id).name + "' must be finite and non-negative");
    }
    if (seen[*leaf]) throw InputError("target key '" + tree.node(id).name + "' given twice");
    seen[*leaf] = true;
    q.probs_[*leaf] = w;
    total += w;
  }
  if (!(total >= tolerance.low && total <= tolerance.high)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "target weights sum to " << total << ", outside [" << tolerance.low << ", " << tolerance.high << "]";
    throw InputError(msg.str());
  }
  for (std::size_t j = 0; j < q.probs_.size(); ++j) {
    q.probs_[j] /= total;
    if (q.probs_[j] > 0.0) q.support_.push_back(j);
  }
  return q;
}

}  // namespace tagforest
