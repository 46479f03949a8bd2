#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tagforest/embeddings.hpp"
#include "tagforest/error.hpp"
#include "tagforest/report.hpp"
#include "tagforest/tree.hpp"

namespace tagforest {

// Partition of one level's nodes. Members are ascending node positions and
// clusters are ordered by their first member.
struct ClusterLevel {
  std::vector<std::vector<std::size_t>> members;
  std::vector<std::vector<double>> centroids;
  std::vector<std::string> names;

  std::size_t size() const { return members.size(); }
  // Cluster index per node position.
  std::vector<std::size_t> assignment(std::size_t node_count) const;
  double sse(std::span<const std::vector<double>> points) const;
};

struct KMeansOptions {
  std::size_t k = 2;
  std::uint64_t seed = 0;
  int max_iters = 100;
  // Independent k-means++ starts; the lowest-SSE result is kept.
  int restarts = 4;
};

// Seeded k-means++ followed by Lloyd iterations and a Hartigan single-point
// refinement pass. Empty clusters are repaired by moving the farthest member
// of the highest-SSE cluster. Throws InputError if k == 0, k >= |points| or
// the points have zero dimension.
ClusterLevel cluster_level(std::span<const std::vector<double>> points, const KMeansOptions& options);

struct Topic {
  std::string_view name;
  std::span<const double> centroid;
};

struct ClusterView {
  std::size_t index = 0;
  std::span<const std::size_t> members;
  std::span<const std::string> node_names;
  std::span<const std::vector<double>> points;
  std::span<const double> centroid;
};

// The four refinement capabilities applied to every level's clusters.
class Refiner {
 public:
  virtual ~Refiner() = default;
  virtual std::string summarize(const ClusterView& cluster) const = 0;
  // For each name, the index of the cluster it merges into (itself when it
  // stays). Targets must be representatives: map[map[i]] == map[i] and
  // map[i] <= i.
  virtual std::vector<std::size_t> deduplicate(std::span<const std::string> names) const = 0;
  // Chosen topic index for one node given the candidate topics.
  virtual std::size_t reassign(std::span<const double> point, std::span<const Topic> topics,
                               std::size_t current) const = 0;
  virtual std::string rename(const ClusterView& cluster, std::string_view current) const = 0;
};

// Offline refiner: medoid names, case/whitespace-insensitive deduplication,
// nearest-centroid reassignment and identity renaming.
class OfflineRefiner : public Refiner {
 public:
  std::string summarize(const ClusterView& cluster) const override;
  std::vector<std::size_t> deduplicate(std::span<const std::string> names) const override;
  std::size_t reassign(std::span<const double> point, std::span<const Topic> topics,
                       std::size_t current) const override;
  std::string rename(const ClusterView& cluster, std::string_view current) const override;
};

// Names clusters by medoid and otherwise leaves the partition untouched.
class IdentityRefiner : public OfflineRefiner {
 public:
  std::vector<std::size_t> deduplicate(std::span<const std::string> names) const override;
  std::size_t reassign(std::span<const double> point, std::span<const Topic> topics,
                       std::size_t current) const override;
};

std::string canonical_topic(std::string_view name);

class RefinerError : public Error {
 public:
  RefinerError(std::string step, std::size_t cluster, const std::string& what)
      : Error("refiner step '" + step + "' failed on cluster " + std::to_string(cluster) + ": " + what),
        step_(std::move(step)),
        cluster_(cluster) {}
  const std::string& step() const { return step_; }
  std::size_t cluster() const { return cluster_; }

 private:
  std::string step_;
  std::size_t cluster_;
};

// Summarize, deduplicate, reassign and rename. The result is again a
// partition of the same node positions with no empty clusters.
ClusterLevel refine_clusters(const ClusterLevel& level, std::span<const std::vector<double>> points,
                             std::span<const std::string> node_names, const Refiner& refiner);

struct TreeBuildConfig {
  int depth_limit = 10;
  // Per-level cluster count is ceil(nodes / branching_ratio) unless a fixed
  // count is given.
  double branching_ratio = 10.0;
  std::optional<std::size_t> clusters_per_level;
  std::uint64_t seed = 0;
  int kmeans_iters = 100;
  int kmeans_restarts = 4;
  const Refiner* refiner = nullptr;  // OfflineRefiner when null

  void validate() const;
};

struct TreeBuildResult {
  TagTree tree;
  ValidationReport report;
  // Refined partitions, bottom level first.
  std::vector<ClusterLevel> levels;
};

// Bottom-up construction: leaves are the tags; each round clusters the
// current nodes on unit-normalized embeddings, refines the clusters and
// promotes them to the next level. Stops at the depth limit or when one node
// remains; several remaining nodes get a synthetic root.
TreeBuildResult build_tree(std::span<const std::string> tags, const EmbeddingTable& embeddings,
                           const TreeBuildConfig& config);

}  // namespace tagforest
