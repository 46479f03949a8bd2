#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tagforest/embeddings.hpp"
#include "tagforest/instance.hpp"
#include "tagforest/matrices.hpp"
#include "tagforest/report.hpp"
#include "tagforest/tree.hpp"

namespace tagforest {

inline constexpr double kDefaultMinSimilarity = 0.3;

struct TagMatch {
  std::string tag;
  NodeId leaf = 0;
  double similarity = 0.0;
};

// Leaf and tree activation of one instance. `leaves` is the support of the
// binary leaf vector as ascending leaf columns; `tree_counts` is M * h_leaf
// with integer ancestor counts.
struct ActivationProfile {
  std::string instance_id;
  std::vector<std::size_t> leaves;
  SparseVector tree_counts;
  std::vector<TagMatch> matched;
  std::vector<std::string> dropped;
  std::vector<std::string> fallback_tags;

  bool anchorable() const { return !leaves.empty(); }
};

// Unit vectors for every leaf, resolved once per (tree, embeddings) pair.
// Leaf vectors come from the node's stored embedding, then the table entry
// for the leaf name, then the hashed fallback.
class LeafIndex {
 public:
  LeafIndex(const TagTree& tree, const EmbeddingTable* embeddings);

  const TagTree& tree() const { return *tree_; }
  const EmbeddingTable* embeddings() const { return embeddings_; }
  std::size_t dimension() const { return dim_; }
  std::span<const double> leaf_vector(std::size_t leaf) const { return {vectors_.data() + leaf * dim_, dim_}; }
  // Leaves whose vector had to be synthesized.
  const std::vector<std::size_t>& fallback_leaves() const { return fallback_leaves_; }

 private:
  const TagTree* tree_;
  const EmbeddingTable* embeddings_;
  std::size_t dim_ = 0;
  std::vector<double> vectors_;
  std::vector<std::size_t> fallback_leaves_;
};

ActivationProfile anchor_instance(const Instance& instance, const LeafIndex& index, const AncestryMatrix& ancestry,
                                  double min_similarity = kDefaultMinSimilarity);

struct AnchoredPool {
  std::vector<ActivationProfile> profiles;  // input order
  ValidationReport report;
};

AnchoredPool anchor_pool(std::span<const Instance> pool, const TagTree& tree, const EmbeddingTable* embeddings,
                         double min_similarity = kDefaultMinSimilarity, unsigned workers = 1);

// Row of anchored.jsonl: leaves are node ids, scores are the normalized ones
// used by the sampler. An empty leaf list marks an unanchorable instance.
struct AnchoredRecord {
  std::string id;
  std::vector<NodeId> leaves;
  std::vector<std::string> dropped;
  double quality = 0.0;
  double complexity = 0.0;

  friend bool operator==(const AnchoredRecord&, const AnchoredRecord&) = default;
};

std::vector<AnchoredRecord> to_records(std::span<const Instance> pool, std::span<const ActivationProfile> profiles,
                                       const TagTree& tree);

}  // namespace tagforest
