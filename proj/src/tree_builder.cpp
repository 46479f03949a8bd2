#include "tagforest/tree_builder.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

namespace tagforest {
namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> mean_of(std::span<const std::vector<double>> points, std::span<const std::size_t> idx,
                            std::size_t dim) {
  std::vector<double> c(dim, 0.0);
  for (auto i : idx)
    for (std::size_t d = 0; d < dim; ++d) c[d] += points[i][d];
  if (!idx.empty())
    for (double& v : c) v /= static_cast<double>(idx.size());
  return c;
}

struct Clustering {
  std::vector<std::size_t> assign;
  std::vector<std::vector<double>> centroids;
  double sse = 0.0;
};

void recompute_centroids(std::span<const std::vector<double>> points, Clustering& cl) {
  const std::size_t k = cl.centroids.size();
  const std::size_t dim = points.front().size();
  std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ++counts[cl.assign[i]];
    for (std::size_t d = 0; d < dim; ++d) sums[cl.assign[i]][d] += points[i][d];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t d = 0; d < dim; ++d) cl.centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
  }
}

std::size_t nearest(std::span<const double> x, const std::vector<std::vector<double>>& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(x, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

// Moves the farthest member of the highest-SSE cluster into each empty
// cluster. Returns false when no donor with positive SSE remains.
bool repair_empty(std::span<const std::vector<double>> points, Clustering& cl) {
  const std::size_t k = cl.centroids.size();
  for (;;) {
    std::vector<std::size_t> counts(k, 0);
    std::vector<double> sse(k, 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      ++counts[cl.assign[i]];
      sse[cl.assign[i]] += squared_distance(points[i], cl.centroids[cl.assign[i]]);
    }
    auto empty = std::find(counts.begin(), counts.end(), 0u);
    if (empty == counts.end()) return true;
    std::size_t donor = k;
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] >= 2 && sse[c] > 0.0 && (donor == k || sse[c] > sse[donor])) donor = c;
    if (donor == k) return false;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (cl.assign[i] != donor) continue;
      const double d = squared_distance(points[i], cl.centroids[donor]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    const auto target = static_cast<std::size_t>(empty - counts.begin());
    cl.assign[far] = target;
    cl.centroids[target] = points[far];
    recompute_centroids(points, cl);
  }
}

Clustering kmeans_once(std::span<const std::vector<double>> points, std::size_t k, std::mt19937_64& rng,
                       int max_iters) {
  const std::size_t n = points.size();
  Clustering cl;
  // k-means++ seeding.
  std::vector<std::size_t> chosen{std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)))};
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], points[chosen[0]]);
  while (chosen.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = uniform01(rng) * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] == 0.0) continue;
        cum += d2[i];
        if (cum > r) {
          pick = i;
          break;
        }
      }
      if (pick == n) {
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) {
          pick = i;
          break;
        }
    }
    chosen.push_back(pick);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points[i], points[pick]));
  }
  for (auto c : chosen) cl.centroids.push_back(points[c]);

  // Lloyd.
  cl.assign.assign(n, k);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = nearest(points[i], cl.centroids);
      if (c != cl.assign[i]) {
        cl.assign[i] = c;
        changed = true;
      }
    }
    const auto before = cl.assign;
    repair_empty(points, cl);
    if (cl.assign != before) changed = true;
    recompute_centroids(points, cl);
    if (!changed) break;
  }

  // Hartigan refinement: move single points when the exact SSE change is
  // negative. Lloyd fixed points with a lopsided split are escaped here.
  std::vector<std::size_t> counts(k, 0);
  for (auto a : cl.assign) ++counts[a];
  const std::size_t dim = points.front().size();
  for (int pass = 0; pass < max_iters; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = cl.assign[i];
      if (counts[a] <= 1) continue;
      const double na = static_cast<double>(counts[a]);
      const double remove_gain = na / (na - 1.0) * squared_distance(points[i], cl.centroids[a]);
      std::size_t best = a;
      double best_cost = remove_gain;
      for (std::size_t b = 0; b < k; ++b) {
        if (b == a || counts[b] == 0) continue;
        const double nb = static_cast<double>(counts[b]);
        const double add_cost = nb / (nb + 1.0) * squared_distance(points[i], cl.centroids[b]);
        if (add_cost < best_cost) {
          best_cost = add_cost;
          best = b;
        }
      }
      if (best != a && best_cost < remove_gain - 1e-12 * (1.0 + remove_gain)) {
        const double nb = static_cast<double>(counts[best]);
        for (std::size_t d = 0; d < dim; ++d) {
          cl.centroids[a][d] = (cl.centroids[a][d] * na - points[i][d]) / (na - 1.0);
          cl.centroids[best][d] = (cl.centroids[best][d] * nb + points[i][d]) / (nb + 1.0);
        }
        --counts[a];
        ++counts[best];
        cl.assign[i] = best;
        moved = true;
      }
    }
    if (!moved) break;
  }
  recompute_centroids(points, cl);

  for (std::size_t i = 0; i < n; ++i) cl.sse += squared_distance(points[i], cl.centroids[cl.assign[i]]);
  return cl;
}

ClusterLevel to_level(std::span<const std::vector<double>> points, const std::vector<std::size_t>& assign,
                      std::size_t k) {
  std::vector<std::vector<std::size_t>> groups(k);
  for (std::size_t i = 0; i < assign.size(); ++i) groups[assign[i]].push_back(i);
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  ClusterLevel level;
  const std::size_t dim = points.front().size();
  for (auto& g : groups) {
    level.centroids.push_back(mean_of(points, g, dim));
    level.members.push_back(std::move(g));
  }
  level.names.assign(level.members.size(), std::string());
  return level;
}

}  // namespace

std::vector<std::size_t> ClusterLevel::assignment(std::size_t node_count) const {
  std::vector<std::size_t> out(node_count, members.size());
  for (std::size_t c = 0; c < members.size(); ++c)
    for (auto i : members[c]) out[i] = c;
  return out;
}

double ClusterLevel::sse(std::span<const std::vector<double>> points) const {
  double total = 0.0;
  for (std::size_t c = 0; c < members.size(); ++c)
    for (auto i : members[c]) total += squared_distance(points[i], centroids[c]);
  return total;
}

ClusterLevel cluster_level(std::span<const std::vector<double>> points, const KMeansOptions& options) {
  if (options.k == 0) throw InputError("k must be positive");
  if (options.k >= points.size()) {
    throw InputError("k (" + std::to_string(options.k) + ") must be smaller than the number of nodes (" +
                     std::to_string(points.size()) + ")");
  }
  const std::size_t dim = points.front().size();
  if (dim == 0) throw InputError("embeddings have zero dimension");
  for (const auto& p : points)
    if (p.size() != dim) throw InputError("embeddings have inconsistent dimensions");

  std::optional<Clustering> best;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    std::mt19937_64 rng(mix_seed(options.seed, static_cast<std::uint64_t>(r)));
    auto cl = kmeans_once(points, options.k, rng, std::max(1, options.max_iters));
    if (!best || cl.sse < best->sse) best = std::move(cl);
  }
  return to_level(points, best->assign, options.k);
}

// ---- refiners ---------------------------------------------------------------

std::string canonical_topic(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

std::string OfflineRefiner::summarize(const ClusterView& cluster) const {
  std::size_t best = cluster.members.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (auto i : cluster.members) {
    const double d = squared_distance(cluster.points[i], cluster.centroid);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return cluster.node_names[best];
}

std::vector<std::size_t> OfflineRefiner::deduplicate(std::span<const std::string> names) const {
  std::map<std::string, std::size_t> first;
  std::vector<std::size_t> map(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) map[i] = first.emplace(canonical_topic(names[i]), i).first->second;
  return map;
}

std::size_t OfflineRefiner::reassign(std::span<const double> point, std::span<const Topic> topics,
                                     std::size_t current) const {
  std::size_t best = current;
  double best_d = squared_distance(point, topics[current].centroid);
  for (std::size_t t = 0; t < topics.size(); ++t) {
    const double d = squared_distance(point, topics[t].centroid);
    if (d < best_d) {
      best_d = d;
      best = t;
    }
  }
  return best;
}

std::string OfflineRefiner::rename(const ClusterView&, std::string_view current) const { return std::string(current); }

std::vector<std::size_t> IdentityRefiner::deduplicate(std::span<const std::string> names) const {
  std::vector<std::size_t> map(names.size());
  for (std::size_t i = 0; i < map.size(); ++i) map[i] = i;
  return map;
}

std::size_t IdentityRefiner::reassign(std::span<const double>, std::span<const Topic>, std::size_t current) const {
  return current;
}

ClusterLevel refine_clusters(const ClusterLevel& level, std::span<const std::vector<double>> points,
                             std::span<const std::string> node_names, const Refiner& refiner) {
  if (level.size() == 0) return level;
  const std::size_t dim = points.front().size();
  auto view = [&](std::size_t c, const std::vector<std::size_t>& members, const std::vector<double>& centroid) {
    return ClusterView{c, members, node_names, points, centroid};
  };

  // 1. Summarization.
  std::vector<std::string> names(level.size());
  for (std::size_t c = 0; c < level.size(); ++c) {
    try {
      names[c] = refiner.summarize(view(c, level.members[c], level.centroids[c]));
    } catch (const std::exception& e) {
      throw RefinerError("summarize", c, e.what());
    }
    if (names[c].empty()) throw RefinerError("summarize", c, "empty topic name");
  }

  // 2. Deduplication.
  std::vector<std::size_t> map;
  try {
    map = refiner.deduplicate(names);
  } catch (const std::exception& e) {
    throw RefinerError("deduplicate", 0, e.what());
  }
  if (map.size() != level.size()) throw RefinerError("deduplicate", 0, "merge map has the wrong length");
  for (std::size_t c = 0; c < map.size(); ++c) {
    if (map[c] > c || map[map[c]] != map[c])
      throw RefinerError("deduplicate", c, "merge target is not a representative cluster");
  }
  std::vector<std::vector<std::size_t>> merged;
  std::vector<std::string> merged_names;
  std::vector<std::size_t> slot(level.size());
  for (std::size_t c = 0; c < level.size(); ++c) {
    if (map[c] == c) {
      slot[c] = merged.size();
      merged.emplace_back();
      merged_names.push_back(names[c]);
    }
    auto& dst = merged[slot[map[c]]];
    dst.insert(dst.end(), level.members[c].begin(), level.members[c].end());
  }
  std::vector<std::vector<double>> centroids;
  for (auto& m : merged) {
    std::sort(m.begin(), m.end());
    centroids.push_back(mean_of(points, m, dim));
  }

  // 3. Reassignment against the merged topics.
  std::vector<Topic> topics;
  for (std::size_t t = 0; t < merged.size(); ++t) topics.push_back({merged_names[t], centroids[t]});
  std::vector<std::size_t> assign(points.size(), merged.size());
  for (std::size_t t = 0; t < merged.size(); ++t)
    for (auto i : merged[t]) assign[i] = t;
  std::vector<std::size_t> chosen(points.size(), merged.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (assign[i] == merged.size()) throw RefinerError("reassign", 0, "node " + std::to_string(i) + " is unassigned");
    try {
      chosen[i] = refiner.reassign(points[i], topics, assign[i]);
    } catch (const std::exception& e) {
      throw RefinerError("reassign", assign[i], e.what());
    }
    if (chosen[i] >= merged.size()) throw RefinerError("reassign", assign[i], "chose an unknown topic");
  }

  std::vector<std::vector<std::size_t>> groups(merged.size());
  for (std::size_t i = 0; i < points.size(); ++i) groups[chosen[i]].push_back(i);

  // 4. Renaming; empty topics disappear.
  ClusterLevel out;
  std::vector<std::size_t> order;
  for (std::size_t t = 0; t < groups.size(); ++t)
    if (!groups[t].empty()) order.push_back(t);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return groups[a].front() < groups[b].front(); });
  for (auto t : order) {
    auto centroid = mean_of(points, groups[t], dim);
    const auto c = out.members.size();
    std::string name;
    try {
      name = refiner.rename(view(c, groups[t], centroid), merged_names[t]);
    } catch (const std::exception& e) {
      throw RefinerError("rename", c, e.what());
    }
    if (name.empty()) throw RefinerError("rename", c, "empty topic name");
    out.members.push_back(std::move(groups[t]));
    out.centroids.push_back(std::move(centroid));
    out.names.push_back(std::move(name));
  }
  return out;
}

// ---- build ------------------------------------------------------------------

void TreeBuildConfig::validate() const {
  if (depth_limit < 1) throw InputError("depth limit must be >= 1");
  if (!clusters_per_level && !(branching_ratio > 1.0)) throw InputError("branching ratio must exceed 1");
  if (clusters_per_level && *clusters_per_level == 0) throw InputError("clusters per level must be positive");
  if (kmeans_iters < 1) throw InputError("k-means iterations must be positive");
}

TreeBuildResult build_tree(std::span<const std::string> tags, const EmbeddingTable& embeddings,
                           const TreeBuildConfig& config) {
  config.validate();
  if (tags.empty()) throw InputError("no tags to build a tree from");
  {
    std::set<std::string_view> seen;
    for (const auto& t : tags) {
      if (t.empty()) throw InputError("empty tag");
      if (!seen.insert(t).second) throw InputError("duplicate tag '" + t + "'");
    }
  }
  const OfflineRefiner default_refiner;
  const Refiner& refiner = config.refiner ? *config.refiner : default_refiner;
  const std::size_t dim = embeddings.dimension();

  ValidationReport report;
  std::vector<std::string> names;
  std::vector<std::optional<std::size_t>> parents;
  std::vector<std::vector<double>> raw;
  for (const auto& tag : tags) {
    names.push_back(tag);
    parents.emplace_back();
    if (auto v = embeddings.find(tag)) {
      raw.emplace_back(v->begin(), v->end());
    } else {
      raw.push_back(fallback_embedding(tag, dim));
      report.add_warning("tag '" + tag + "'", "no embedding; using hashed fallback");
    }
  }

  std::vector<ClusterLevel> levels;
  std::vector<std::size_t> current(tags.size());
  for (std::size_t i = 0; i < current.size(); ++i) current[i] = i;

  for (int round = 1; round < config.depth_limit && current.size() > 1; ++round) {
    const std::size_t n = current.size();
    const std::size_t k = config.clusters_per_level
                              ? *config.clusters_per_level
                              : static_cast<std::size_t>(std::ceil(static_cast<double>(n) / config.branching_ratio));
    if (k >= n) break;
    std::vector<std::vector<double>> points;
    std::vector<std::string> level_names;
    for (auto g : current) {
      points.push_back(normalized(raw[g]));
      level_names.push_back(names[g]);
    }
    KMeansOptions opts{k, mix_seed(config.seed, static_cast<std::uint64_t>(round)), config.kmeans_iters,
                       config.kmeans_restarts};
    auto level = refine_clusters(cluster_level(points, opts), points, level_names, refiner);

    std::vector<std::size_t> next;
    for (std::size_t c = 0; c < level.size(); ++c) {
      const std::size_t g = names.size();
      names.push_back(level.names[c]);
      parents.emplace_back();
      std::vector<double> mean(dim, 0.0);
      for (auto m : level.members[c]) {
        parents[current[m]] = g;
        for (std::size_t d = 0; d < dim; ++d) mean[d] += raw[current[m]][d];
      }
      for (double& v : mean) v /= static_cast<double>(level.members[c].size());
      raw.push_back(std::move(mean));
      next.push_back(g);
    }
    levels.push_back(std::move(level));
    current = std::move(next);
  }

  if (current.size() > 1) {
    const std::size_t g = names.size();
    names.emplace_back("root");
    parents.emplace_back();
    std::vector<double> mean(dim, 0.0);
    for (auto c : current) {
      parents[c] = g;
      for (std::size_t d = 0; d < dim; ++d) mean[d] += raw[c][d];
    }
    for (double& v : mean) v /= static_cast<double>(current.size());
    raw.push_back(std::move(mean));
  }

  std::vector<std::optional<std::vector<double>>> node_embeddings(raw.begin(), raw.end());
  TreeLimits limits{std::max(64, config.depth_limit)};
  auto tree = TagTree::from_parent_links(std::move(names), parents, std::move(node_embeddings), limits);
  return {std::move(tree), std::move(report), std::move(levels)};
}

}  // namespace tagforest
