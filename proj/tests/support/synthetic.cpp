#include "synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <optional>

namespace tagforest::synth {
namespace {

std::vector<std::size_t> pick_leaves(Rng& rng, std::size_t leaf_count, std::size_t max_leaves,
                                     const std::vector<double>& weights) {
  std::uniform_int_distribution<std::size_t> how_many(1, std::min(max_leaves, leaf_count));
  const std::size_t k = how_many(rng);
  std::vector<std::size_t> out;
  if (weights.empty()) {
    std::uniform_int_distribution<std::size_t> any(0, leaf_count - 1);
    while (out.size() < k) {
      auto j = any(rng);
      if (std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
    }
  } else {
    std::discrete_distribution<std::size_t> draw(weights.begin(), weights.end());
    for (std::size_t tries = 0; out.size() < k && tries < 64 * k; ++tries) {
      auto j = draw(rng);
      if (std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TagTree random_tree(Rng& rng, std::size_t nodes) {
  std::vector<std::string> names;
  std::vector<std::optional<std::size_t>> parents;
  for (std::size_t i = 0; i < nodes; ++i) {
    names.push_back("n" + std::to_string(i));
    if (i == 0) {
      parents.emplace_back();
    } else {
      std::uniform_int_distribution<std::size_t> d(0, i - 1);
      parents.emplace_back(d(rng));
    }
  }
  return TagTree::from_parent_links(std::move(names), parents);
}

TagTree layered_tree(Rng& rng, std::size_t leaves, std::size_t min_fanout, std::size_t max_fanout) {
  std::vector<std::string> names;
  std::vector<std::optional<std::size_t>> parents;
  std::vector<std::size_t> level;
  for (std::size_t i = 0; i < leaves; ++i) {
    names.push_back("leaf" + std::to_string(i));
    parents.emplace_back();
    level.push_back(i);
  }
  std::uniform_int_distribution<std::size_t> fan(min_fanout, max_fanout);
  std::size_t round = 0;
  while (level.size() > 1) {
    std::vector<std::size_t> next;
    for (std::size_t k = 0; k < level.size();) {
      const std::size_t take = std::min(fan(rng), level.size() - k);
      const std::size_t parent = names.size();
      names.push_back("t" + std::to_string(round) + "_" + std::to_string(next.size()));
      parents.emplace_back();
      for (std::size_t c = 0; c < take; ++c) parents[level[k + c]] = parent;
      next.push_back(parent);
      k += take;
    }
    level = std::move(next);
    ++round;
  }
  return TagTree::from_parent_links(std::move(names), parents);
}

std::vector<oracle::Item> random_items(Rng& rng, const TagTree& tree, std::size_t count, std::size_t max_leaves) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<oracle::Item> out;
  for (std::size_t i = 0; i < count; ++i) {
    oracle::Item item;
    for (auto j : pick_leaves(rng, tree.leaf_count(), max_leaves, {})) item.leaves.push_back(tree.leaves()[j]);
    item.score = u(rng);
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<AnchoredRecord> random_records(Rng& rng, const TagTree& tree, std::size_t count,
                                           std::size_t max_leaves, const std::vector<double>& leaf_weights,
                                           const std::string& prefix) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<AnchoredRecord> out;
  out.reserve(count);
  char buf[32];
  for (std::size_t i = 0; i < count; ++i) {
    AnchoredRecord rec;
    std::snprintf(buf, sizeof buf, "%06zu", i);
    rec.id = prefix + buf;
    for (auto j : pick_leaves(rng, tree.leaf_count(), max_leaves, leaf_weights)) rec.leaves.push_back(tree.leaves()[j]);
    rec.quality = u(rng);
    rec.complexity = u(rng);
    out.push_back(std::move(rec));
  }
  return out;
}

Blobs planted_blobs(Rng& rng, std::size_t blobs, std::size_t per_blob, std::size_t dim, double spread) {
  Blobs out;
  std::normal_distribution<double> n(0.0, 1.0);
  for (std::size_t b = 0; b < blobs; ++b) {
    // Centres on distinct coordinate axes, scaled so blobs stay apart after
    // unit normalization.
    std::vector<double> centre(dim, 0.0);
    centre[b % dim] = (b / dim) % 2 == 0 ? 10.0 : -10.0;
    for (std::size_t i = 0; i < per_blob; ++i) {
      std::vector<double> v(centre);
      for (auto& x : v) x += spread * n(rng);
      out.tags.push_back("blob" + std::to_string(b) + "_" + std::to_string(i));
      out.vectors.push_back(std::move(v));
      out.label.push_back(b);
    }
  }
  return out;
}

}  // namespace tagforest::synth
