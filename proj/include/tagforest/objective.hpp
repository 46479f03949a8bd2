#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tagforest/anchoring.hpp"
#include "tagforest/matrices.hpp"
#include "tagforest/target.hpp"

namespace tagforest {

// Mixing weight for quality vs complexity, exponent of the concave utility
// x^gamma, strength of the KL alignment term and the additive leaf-count
// smoothing used inside the KL term.
struct ObjectiveConfig {
  double alpha = 0.8;
  double gamma = 0.85;
  double lambda = 0.0;
  double epsilon = 1e-9;

  // Throws InputError when a field is outside its admissible range.
  void validate() const;
};

inline constexpr double kAlignedLambda = 5.0;
// Accumulated mass below this uses the derivative at this point.
inline constexpr double kGradientFloor = 1e-6;

double composite_score(double quality, double complexity, double alpha);

// e = s * h_tree
SparseVector raw_info_vector(double score, const SparseVector& tree_counts);

double utility_derivative(double x, double gamma);

// sum_j (A * sum_k e_k)_j ^ gamma
double subset_information(std::span<const SparseVector> info_vectors, const PropagationMatrix& propagation,
                          double gamma);
double subset_information(std::span<const ActivationProfile> profiles, std::span<const double> scores,
                          const PropagationMatrix& propagation, double gamma);

// Running state of a selected subset: raw info mass sum_k e_k, its propagated
// image A * sum_k e_k, and leaf activation counts for the KL term.
class InfoState {
 public:
  InfoState(const PropagationMatrix& propagation, std::size_t leaf_count);

  // Adds one instance. Only rows of the accumulated vector whose columns
  // touch the instance's support are recomputed.
  void add(const SparseVector& tree_counts, std::span<const std::size_t> leaves, double score);

  // Dense rebuild from an ordered list of picks; bitwise equal to applying add()
  // in the same order.
  static InfoState from_scratch(const PropagationMatrix& propagation, std::size_t leaf_count,
                                std::span<const ActivationProfile* const> picks, std::span<const double> scores);

  const std::vector<double>& raw() const { return raw_; }
  const std::vector<double>& accumulated() const { return accumulated_; }
  const std::vector<std::int64_t>& leaf_counts() const { return leaf_counts_; }
  std::int64_t total_leaf_mass() const { return total_leaf_mass_; }
  std::size_t size() const { return size_; }
  std::size_t leaf_count() const { return leaf_counts_.size(); }

  double information(double gamma) const;

 private:
  const PropagationMatrix* propagation_;
  std::vector<double> raw_;
  std::vector<double> accumulated_;
  std::vector<std::int64_t> leaf_counts_;
  std::int64_t total_leaf_mass_ = 0;
  std::size_t size_ = 0;
};

// G = phi'(accumulated)^T A. The empty state yields the zero vector.
std::vector<double> gradient_vector(const InfoState& state, const PropagationMatrix& propagation, double gamma);

// G . e
double marginal_gain_approx(std::span<const double> gradient, const SparseVector& info_vector);

// KL(Q || P) with P_j proportional to leaf_counts_j + candidate_j + epsilon.
double kl_penalty(const TargetDistribution& target, const InfoState& state,
                  std::span<const std::size_t> candidate_leaves, double epsilon);

// KL(Q || P) for explicit leaf counts.
double kl_divergence(const TargetDistribution& target, std::span<const std::int64_t> leaf_counts, double epsilon);

inline double utility(double x, double gamma) { return x > 0.0 ? std::pow(x, gamma) : 0.0; }

}  // namespace tagforest
