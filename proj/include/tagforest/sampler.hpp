#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tagforest/anchoring.hpp"
#include "tagforest/instance.hpp"
#include "tagforest/objective.hpp"
#include "tagforest/report.hpp"
#include "tagforest/target.hpp"
#include "tagforest/tree.hpp"

namespace tagforest {

enum class SamplingMode { kGeneral, kAligned };

// How InfoState advances between picks. kFromScratch rebuilds it from the
// pick list every iteration and exists to audit the incremental path.
enum class StateUpdate { kIncremental, kFromScratch };

struct SamplerConfig {
  std::size_t budget = 0;
  ObjectiveConfig objective;
  std::uint64_t seed = 0;
  SamplingMode mode = SamplingMode::kGeneral;
  unsigned workers = 1;
  StateUpdate state_update = StateUpdate::kIncremental;
};

struct PickRecord {
  std::size_t iteration = 0;
  std::string id;
  double score = 0.0;
  double gain = 0.0;
  std::optional<double> kl;  // only evaluated in aligned mode
  double joint = 0.0;

  friend bool operator==(const PickRecord&, const PickRecord&) = default;
};

struct SelectionTrace {
  SamplingMode mode = SamplingMode::kGeneral;
  std::size_t budget = 0;
  std::size_t pool_size = 0;
  std::vector<std::string> excluded;  // unanchorable ids
  std::vector<PickRecord> picks;
  double final_information = 0.0;
  std::optional<double> final_kl;
};

struct SampleResult {
  std::vector<std::size_t> selected;  // indices into the input records, pick order
  SelectionTrace trace;
  ValidationReport report;
};

// Greedy budgeted selection maximizing G.e_d - lambda * KL(Q || P(D_S + d))
// with G recomputed from the current subset every iteration. Ties resolve by
// composite score (descending) and then id (ascending), so the result is
// independent of input order and worker count.
SampleResult sample(std::span<const AnchoredRecord> records, const TagTree& tree, const SamplerConfig& config,
                    const TargetDistribution* target = nullptr);

// Q_j proportional to the number of reference instances activating leaf j.
TargetDistribution derive_target(std::span<const AnchoredRecord> reference, const TagTree& tree);

// Writes the picks as subset.jsonl, one line per pick in pick order. With a
// pool the original instance fields are emitted; otherwise the anchored
// record fields are. Trace fields (pick, score, leaves, gain, joint) follow.
std::string format_subset(const SampleResult& result, std::span<const AnchoredRecord> records,
                          const Pool* original_pool);
void export_subset(const SampleResult& result, std::span<const AnchoredRecord> records, const Pool* original_pool,
                   const std::filesystem::path& path);

std::string format_trace(const SelectionTrace& trace);

}  // namespace tagforest
