#include "tagforest/anchoring.hpp"

#include <algorithm>
#include <set>

#include "tagforest/error.hpp"
#include "tagforest/parallel.hpp"

namespace tagforest {

LeafIndex::LeafIndex(const TagTree& tree, const EmbeddingTable* embeddings) : tree_(&tree), embeddings_(embeddings) {
  for (const auto& node : tree.nodes()) {
    if (node.embedding) {
      dim_ = node.embedding->size();
      break;
    }
  }
  if (embeddings) {
    if (dim_ != 0 && dim_ != embeddings->dimension()) {
      throw InputError("tree embedding dimension " + std::to_string(dim_) + " differs from embedding table dimension " +
                       std::to_string(embeddings->dimension()));
    }
    dim_ = embeddings->dimension();
  }
  if (dim_ == 0) return;  // exact-name matching only

  vectors_.resize(tree.leaf_count() * dim_);
  for (std::size_t j = 0; j < tree.leaf_count(); ++j) {
    const auto& node = tree.node(tree.leaves()[j]);
    std::vector<double> v;
    if (node.embedding) {
      v = normalized(*node.embedding);
    } else if (auto hit = embeddings ? embeddings->find(node.name) : std::nullopt) {
      v = normalized(*hit);
    } else {
      v = fallback_embedding(node.name, dim_);
      fallback_leaves_.push_back(j);
    }
    std::copy(v.begin(), v.end(), vectors_.begin() + static_cast<std::ptrdiff_t>(j * dim_));
  }
}

ActivationProfile anchor_instance(const Instance& instance, const LeafIndex& index, const AncestryMatrix& ancestry,
                                  double min_similarity) {
  const auto& tree = index.tree();
  ActivationProfile profile;
  profile.instance_id = instance.id;
  std::set<std::string> seen_tags;
  std::vector<std::size_t> hits;

  for (const auto& tag : instance.tags) {
    if (!seen_tags.insert(tag).second) continue;
    if (auto leaf = tree.find_leaf(tag)) {
      profile.matched.push_back({tag, *leaf, 1.0});
      hits.push_back(*tree.leaf_index(*leaf));
      continue;
    }
    if (index.dimension() == 0) {
      profile.dropped.push_back(tag);
      continue;
    }
    std::vector<double> query;
    const auto* table = index.embeddings();
    if (auto v = table ? table->find(tag) : std::nullopt) {
      query = normalized(*v);
    } else {
      query = fallback_embedding(tag, index.dimension());
      profile.fallback_tags.push_back(tag);
    }
    std::size_t best = 0;
    double best_sim = -2.0;
    for (std::size_t j = 0; j < tree.leaf_count(); ++j) {
      const double sim = dot(query, index.leaf_vector(j));
      if (sim > best_sim) {
        best_sim = sim;
        best = j;
      }
    }
    if (best_sim < min_similarity) {
      profile.dropped.push_back(tag);
      continue;
    }
    profile.matched.push_back({tag, tree.leaves()[best], best_sim});
    hits.push_back(best);
  }

  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  profile.leaves = std::move(hits);
  profile.tree_counts = ancestry.multiply(profile.leaves);
  return profile;
}

AnchoredPool anchor_pool(std::span<const Instance> pool, const TagTree& tree, const EmbeddingTable* embeddings,
                         double min_similarity, unsigned workers) {
  AnchoredPool out;
  if (pool.empty()) return out;
  const LeafIndex index(tree, embeddings);
  const auto ancestry = build_ancestry_matrix(tree);

  out.profiles.resize(pool.size());
  WorkerPool threads(resolve_workers(workers));
  const std::size_t chunk = 256;
  const std::size_t chunks = (pool.size() + chunk - 1) / chunk;
  threads.run(chunks, [&](std::size_t c) {
    const auto end = std::min(pool.size(), (c + 1) * chunk);
    for (std::size_t i = c * chunk; i < end; ++i)
      out.profiles[i] = anchor_instance(pool[i], index, ancestry, min_similarity);
  });

  for (auto j : index.fallback_leaves()) {
    out.report.add_warning("leaf '" + tree.node(tree.leaves()[j]).name + "'", "no embedding; using hashed fallback");
  }
  std::set<std::string> warned;
  for (const auto& p : out.profiles) {
    for (const auto& tag : p.fallback_tags) {
      if (warned.insert(tag).second)
        out.report.add_warning("tag '" + tag + "'", "no embedding; using hashed fallback");
    }
    for (const auto& tag : p.dropped) {
      out.report.add_warning("instance '" + p.instance_id + "'",
                             "dropped tag '" + tag + "' below minimum similarity");
    }
    if (!p.anchorable()) out.report.add_warning("instance '" + p.instance_id + "'", "unanchorable: no tag survived");
  }
  return out;
}

std::vector<AnchoredRecord> to_records(std::span<const Instance> pool, std::span<const ActivationProfile> profiles,
                                       const TagTree& tree) {
  if (pool.size() != profiles.size()) throw InputError("profile count differs from pool size");
  std::vector<AnchoredRecord> records;
  records.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    AnchoredRecord r;
    r.id = pool[i].id;
    for (auto j : profiles[i].leaves) r.leaves.push_back(tree.leaves()[j]);
    r.dropped = profiles[i].dropped;
    r.quality = pool[i].quality;
    r.complexity = pool[i].complexity;
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace tagforest
