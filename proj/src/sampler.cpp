#include "tagforest/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tagforest/error.hpp"
#include "tagforest/matrices.hpp"
#include "tagforest/parallel.hpp"

namespace tagforest {
namespace {

struct Best {
  double joint = -std::numeric_limits<double>::infinity();
  std::uint32_t rank = std::numeric_limits<std::uint32_t>::max();
  std::size_t slot = 0;
  double gain = 0.0;
  double kl = 0.0;

  // Higher joint wins; equal joints go to the lower rank, i.e. the higher
  // composite score and then the smaller id.
  bool beaten_by(double j, std::uint32_t r) const { return j > joint || (j == joint && r < rank); }
};

// Candidates in rank order (score desc, id asc) with flattened leaf lists.
struct CandidateSet {
  std::vector<std::size_t> record;
  std::vector<double> score;
  std::vector<std::size_t> leaf_begin;
  std::vector<std::uint32_t> leaf_cols;
  std::vector<ActivationProfile> profiles;

  std::size_t size() const { return record.size(); }
  std::span<const std::uint32_t> leaves(std::size_t r) const {
    return {leaf_cols.data() + leaf_begin[r], leaf_begin[r + 1] - leaf_begin[r]};
  }
};

constexpr std::size_t kMinChunk = 2048;

}  // namespace

SampleResult sample(std::span<const AnchoredRecord> records, const TagTree& tree, const SamplerConfig& config,
                    const TargetDistribution* target) {
  config.objective.validate();
  const auto& obj = config.objective;
  const bool aligned = config.mode == SamplingMode::kAligned;
  if (aligned && target == nullptr) throw InputError("aligned mode requires target");
  if (target && target->leaf_count() != tree.leaf_count()) throw InputError("target is bound to a different tree");

  SampleResult result;
  auto& trace = result.trace;
  trace.mode = config.mode;
  trace.budget = config.budget;
  trace.pool_size = records.size();

  const auto ancestry = build_ancestry_matrix(tree);
  const auto propagation = build_propagation_matrix(tree);
  const std::size_t leaf_count = tree.leaf_count();

  // Eligible candidates.
  std::vector<std::size_t> eligible;
  std::vector<double> scores(records.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    try {
      scores[i] = composite_score(rec.quality, rec.complexity, obj.alpha);
    } catch (const InputError& e) {
      throw InputError("record '" + rec.id + "': " + e.what());
    }
    for (NodeId leaf : rec.leaves) {
      if (!tree.leaf_index(leaf)) {
        throw InputError("record '" + rec.id + "' references node " + std::to_string(leaf) +
                         ", which is not a leaf of the tree");
      }
    }
    if (rec.leaves.empty()) {
      trace.excluded.push_back(rec.id);
      result.report.add_warning("record '" + rec.id + "'", "unanchorable; excluded from sampling");
    } else {
      eligible.push_back(i);
    }
  }
  std::sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return records[a].id < records[b].id;
  });
  for (std::size_t k = 1; k < eligible.size(); ++k) {
    if (records[eligible[k]].id == records[eligible[k - 1]].id)
      throw InputError("duplicate record id '" + records[eligible[k]].id + "'");
  }

  CandidateSet cands;
  cands.leaf_begin.push_back(0);
  for (auto i : eligible) {
    ActivationProfile prof;
    prof.instance_id = records[i].id;
    for (NodeId leaf : records[i].leaves) prof.leaves.push_back(*tree.leaf_index(leaf));
    std::sort(prof.leaves.begin(), prof.leaves.end());
    prof.leaves.erase(std::unique(prof.leaves.begin(), prof.leaves.end()), prof.leaves.end());
    prof.tree_counts = ancestry.multiply(prof.leaves);
    cands.record.push_back(i);
    cands.score.push_back(scores[i]);
    for (auto j : prof.leaves) cands.leaf_cols.push_back(static_cast<std::uint32_t>(j));
    cands.leaf_begin.push_back(cands.leaf_cols.size());
    cands.profiles.push_back(std::move(prof));
  }

  std::size_t budget = config.budget;
  if (budget > cands.size()) {
    result.report.add_warning("sampler", "budget " + std::to_string(budget) + " exceeds " +
                                             std::to_string(cands.size()) + " anchorable instances; selecting all");
    budget = cands.size();
  }

  std::vector<std::uint32_t> alive(cands.size());
  std::iota(alive.begin(), alive.end(), 0u);

  InfoState state(propagation, leaf_count);
  std::vector<const ActivationProfile*> picked;
  std::vector<double> picked_scores;

  std::vector<double> path_gradient(tree.size(), 0.0);
  std::vector<double> leaf_gradient(leaf_count, 0.0);
  std::vector<double> kl_delta(leaf_count, 0.0);
  std::vector<double> log_norm;

  WorkerPool workers(resolve_workers(config.workers));
  std::vector<Best> chunk_best;

  for (std::size_t it = 0; it < budget; ++it) {
    if (config.state_update == StateUpdate::kFromScratch) {
      state = InfoState::from_scratch(propagation, leaf_count, picked, picked_scores);
    }

    // Gain of candidate d is G . e_d = s_d * sum over its leaves of the
    // root-to-leaf path sums of G.
    if (state.size() == 0) {
      std::fill(leaf_gradient.begin(), leaf_gradient.end(), 0.0);
    } else {
      const auto grad = gradient_vector(state, propagation, obj.gamma);
      for (const auto& node : tree.nodes()) {
        const auto id = static_cast<std::size_t>(node.id);
        path_gradient[id] = grad[id] + (node.parent ? path_gradient[static_cast<std::size_t>(*node.parent)] : 0.0);
      }
      for (std::size_t j = 0; j < leaf_count; ++j)
        leaf_gradient[j] = path_gradient[static_cast<std::size_t>(tree.leaves()[j])];
    }

    // KL(Q || P(D_S + d)) = base + sum_{j in d} delta_j + log(Z_d) where
    // Z_d = T + |d| + L * eps.
    double kl_base = 0.0;
    if (aligned) {
      const auto& counts = state.leaf_counts();
      for (auto j : target->support()) {
        const double q = target->at_leaf_index(j);
        const double c = static_cast<double>(counts[j]);
        kl_base += q * (std::log(q) - std::log(c + obj.epsilon));
        kl_delta[j] = q * (std::log(c + obj.epsilon) - std::log(c + 1.0 + obj.epsilon));
      }
      log_norm.clear();
      const double base_mass =
          static_cast<double>(state.total_leaf_mass()) + obj.epsilon * static_cast<double>(leaf_count);
      for (std::size_t k = 0; k <= leaf_count && k <= 4096; ++k)
        log_norm.push_back(std::log(base_mass + static_cast<double>(k)));
    }
    auto log_z = [&](std::size_t k) {
      return k < log_norm.size()
                 ? log_norm[k]
                 : std::log(static_cast<double>(state.total_leaf_mass() + static_cast<std::int64_t>(k)) +
                            obj.epsilon * static_cast<double>(leaf_count));
    };

    const std::size_t n_alive = alive.size();
    const std::size_t chunks =
        std::max<std::size_t>(1, std::min<std::size_t>(workers.size(), (n_alive + kMinChunk - 1) / kMinChunk));
    chunk_best.assign(chunks, Best{});
    workers.run(chunks, [&](std::size_t c) {
      const std::size_t lo = n_alive * c / chunks;
      const std::size_t hi = n_alive * (c + 1) / chunks;
      Best best;
      for (std::size_t slot = lo; slot < hi; ++slot) {
        const std::uint32_t r = alive[slot];
        const auto leaves = cands.leaves(r);
        double path_sum = 0.0;
        for (auto j : leaves) path_sum += leaf_gradient[j];
        const double gain = cands.score[r] * path_sum;
        double joint = gain;
        double kl = 0.0;
        if (aligned) {
          kl = kl_base + log_z(leaves.size());
          for (auto j : leaves) kl += kl_delta[j];
          kl = std::max(kl, 0.0);
          joint = gain - obj.lambda * kl;
        }
        if (best.beaten_by(joint, r)) best = Best{joint, r, slot, gain, kl};
      }
      chunk_best[c] = best;
    });

    Best best;
    for (const auto& b : chunk_best)
      if (best.beaten_by(b.joint, b.rank)) best = b;

    const std::uint32_t r = best.rank;
    PickRecord pick;
    pick.iteration = it;
    pick.id = records[cands.record[r]].id;
    pick.score = cands.score[r];
    pick.gain = best.gain;
    if (aligned) pick.kl = best.kl;
    pick.joint = best.joint;
    trace.picks.push_back(std::move(pick));
    result.selected.push_back(cands.record[r]);

    alive[best.slot] = alive.back();
    alive.pop_back();
    picked.push_back(&cands.profiles[r]);
    picked_scores.push_back(cands.score[r]);
    if (config.state_update == StateUpdate::kIncremental) {
      state.add(cands.profiles[r].tree_counts, cands.profiles[r].leaves, cands.score[r]);
    }
  }
  if (config.state_update == StateUpdate::kFromScratch) {
    state = InfoState::from_scratch(propagation, leaf_count, picked, picked_scores);
  }

  trace.final_information = state.information(obj.gamma);
  if (target) trace.final_kl = kl_divergence(*target, state.leaf_counts(), obj.epsilon);
  return result;
}

TargetDistribution derive_target(std::span<const AnchoredRecord> reference, const TagTree& tree) {
  std::vector<double> hits(tree.leaf_count(), 0.0);
  double total = 0.0;
  for (const auto& rec : reference) {
    std::vector<std::size_t> cols;
    for (NodeId leaf : rec.leaves) {
      auto j = tree.leaf_index(leaf);
      if (!j) throw InputError("reference record '" + rec.id + "' references non-leaf node " + std::to_string(leaf));
      cols.push_back(*j);
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    for (auto j : cols) hits[j] += 1.0;
    total += static_cast<double>(cols.size());
  }
  if (total == 0.0) throw InputError("reference set has no anchored leaves");
  std::vector<std::pair<NodeId, double>> weights;
  for (std::size_t j = 0; j < hits.size(); ++j)
    if (hits[j] > 0.0) weights.emplace_back(tree.leaves()[j], hits[j] / total);
  return TargetDistribution::from_leaf_weights(tree, weights);
}

}  // namespace tagforest
