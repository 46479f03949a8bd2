#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tagforest/anchoring.hpp"
#include "tagforest/target.hpp"
#include "tagforest/tree.hpp"

namespace tagforest {

struct LevelCoverage {
  int depth = 0;
  std::size_t covered = 0;
  std::size_t total = 0;
};

// min, 25%, median, 75%, max (nearest-rank).
using Quantiles = std::array<double, 5>;

struct SubsetStats {
  std::size_t records = 0;
  std::vector<std::int64_t> leaf_histogram;  // indexed by leaf column
  std::optional<double> kl;
  std::vector<LevelCoverage> coverage;
  std::optional<Quantiles> quality;
  std::optional<Quantiles> complexity;
  std::optional<Quantiles> composite;  // only when both scores lie in [0, 1]
};

SubsetStats compute_stats(std::span<const AnchoredRecord> records, const TagTree& tree,
                          const TargetDistribution* target, double alpha, double epsilon);

std::string format_stats(const SubsetStats& stats, const TagTree& tree);

}  // namespace tagforest
