#include "tagforest/objective.hpp"

#include <algorithm>
#include <cmath>

#include "tagforest/error.hpp"

namespace tagforest {

void ObjectiveConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InputError("gamma must lie in (0, 1)");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("lambda must be finite and >= 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be finite and > 0");
}

double composite_score(double quality, double complexity, double alpha) {
  if (!(quality >= 0.0 && quality <= 1.0)) throw InputError("quality must lie in [0, 1]");
  if (!(complexity >= 0.0 && complexity <= 1.0)) throw InputError("complexity must lie in [0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
  return alpha * quality + (1.0 - alpha) * complexity;
}

SparseVector raw_info_vector(double score, const SparseVector& tree_counts) {
  SparseVector e = tree_counts;
  for (double& v : e.value) v *= score;
  return e;
}

double utility_derivative(double x, double gamma) {
  return gamma * std::pow(std::max(x, kGradientFloor), gamma - 1.0);
}

double subset_information(std::span<const SparseVector> info_vectors, const PropagationMatrix& propagation,
                          double gamma) {
  std::vector<double> raw(propagation.size(), 0.0);
  for (const auto& e : info_vectors)
    for (std::size_t k = 0; k < e.nnz(); ++k) raw[static_cast<std::size_t>(e.index[k])] += e.value[k];
  double total = 0.0;
  for (double v : propagation.multiply(raw)) total += utility(v, gamma);
  return total;
}

double subset_information(std::span<const ActivationProfile> profiles, std::span<const double> scores,
                          const PropagationMatrix& propagation, double gamma) {
  if (profiles.size() != scores.size()) throw InputError("profile and score counts differ");
  std::vector<SparseVector> es;
  es.reserve(profiles.size());
  for (std::size_t i = 0; i < profiles.size(); ++i) es.push_back(raw_info_vector(scores[i], profiles[i].tree_counts));
  return subset_information(es, propagation, gamma);
}

InfoState::InfoState(const PropagationMatrix& propagation, std::size_t leaf_count)
    : propagation_(&propagation),
      raw_(propagation.size(), 0.0),
      accumulated_(propagation.size(), 0.0),
      leaf_counts_(leaf_count, 0) {}

void InfoState::add(const SparseVector& tree_counts, std::span<const std::size_t> leaves, double score) {
  for (std::size_t k = 0; k < tree_counts.nnz(); ++k)
    raw_[static_cast<std::size_t>(tree_counts.index[k])] += score * tree_counts.value[k];
  // A has a symmetric sparsity pattern, so the rows reading column q are the
  // columns of row q.
  for (NodeId q : tree_counts.index) {
    for (NodeId p : propagation_->row_columns(static_cast<std::size_t>(q))) {
      accumulated_[static_cast<std::size_t>(p)] = propagation_->row_dot(static_cast<std::size_t>(p), raw_);
    }
  }
  for (auto j : leaves) ++leaf_counts_[j];
  total_leaf_mass_ += static_cast<std::int64_t>(leaves.size());
  ++size_;
}

InfoState InfoState::from_scratch(const PropagationMatrix& propagation, std::size_t leaf_count,
                                  std::span<const ActivationProfile* const> picks, std::span<const double> scores) {
  InfoState state(propagation, leaf_count);
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const auto& tc = picks[i]->tree_counts;
    for (std::size_t k = 0; k < tc.nnz(); ++k)
      state.raw_[static_cast<std::size_t>(tc.index[k])] += scores[i] * tc.value[k];
    for (auto j : picks[i]->leaves) ++state.leaf_counts_[j];
    state.total_leaf_mass_ += static_cast<std::int64_t>(picks[i]->leaves.size());
  }
  state.accumulated_ = propagation.multiply(state.raw_);
  state.size_ = picks.size();
  return state;
}

double InfoState::information(double gamma) const {
  double total = 0.0;
  for (double v : accumulated_) total += utility(v, gamma);
  return total;
}

std::vector<double> gradient_vector(const InfoState& state, const PropagationMatrix& propagation, double gamma) {
  if (state.size() == 0) return std::vector<double>(propagation.size(), 0.0);
  std::vector<double> weights(propagation.size());
  const auto& acc = state.accumulated();
  for (std::size_t p = 0; p < weights.size(); ++p) weights[p] = utility_derivative(acc[p], gamma);
  return propagation.left_multiply(weights);
}

double marginal_gain_approx(std::span<const double> gradient, const SparseVector& info_vector) {
  double gain = 0.0;
  for (std::size_t k = 0; k < info_vector.nnz(); ++k)
    gain += gradient[static_cast<std::size_t>(info_vector.index[k])] * info_vector.value[k];
  return gain;
}

double kl_penalty(const TargetDistribution& target, const InfoState& state,
                  std::span<const std::size_t> candidate_leaves, double epsilon) {
  const auto& counts = state.leaf_counts();
  const double total = static_cast<double>(state.total_leaf_mass() + static_cast<std::int64_t>(candidate_leaves.size())) +
                       epsilon * static_cast<double>(counts.size());
  double kl = 0.0;
  for (auto j : target.support()) {
    double c = static_cast<double>(counts[j]);
    if (std::find(candidate_leaves.begin(), candidate_leaves.end(), j) != candidate_leaves.end()) c += 1.0;
    const double q = target.at_leaf_index(j);
    kl += q * std::log(q * total / (c + epsilon));
  }
  return std::max(kl, 0.0);
}

double kl_divergence(const TargetDistribution& target, std::span<const std::int64_t> leaf_counts, double epsilon) {
  double total = epsilon * static_cast<double>(leaf_counts.size());
  for (auto c : leaf_counts) total += static_cast<double>(c);
  double kl = 0.0;
  for (auto j : target.support()) {
    const double q = target.at_leaf_index(j);
    kl += q * std::log(q * total / (static_cast<double>(leaf_counts[j]) + epsilon));
  }
  return std::max(kl, 0.0);
}

}  // namespace tagforest
