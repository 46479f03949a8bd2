#include "tagforest/stats.hpp"

#include <algorithm>
#include <sstream>

#include "tagforest/error.hpp"
#include "tagforest/objective.hpp"

namespace tagforest {
namespace {

Quantiles quantiles(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  Quantiles q{};
  const double fr[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int i = 0; i < 5; ++i) {
    const auto idx = static_cast<std::size_t>(fr[i] * static_cast<double>(v.size() - 1) + 0.5);
    q[static_cast<std::size_t>(i)] = v[idx];
  }
  return q;
}

}  // namespace

SubsetStats compute_stats(std::span<const AnchoredRecord> records, const TagTree& tree,
                          const TargetDistribution* target, double alpha, double epsilon) {
  SubsetStats s;
  s.records = records.size();
  s.leaf_histogram.assign(tree.leaf_count(), 0);
  std::vector<bool> covered(tree.size(), false);
  std::vector<double> qs, cs, mix;
  bool in_range = true;
  for (const auto& r : records) {
    std::vector<NodeId> leaves = r.leaves;
    std::sort(leaves.begin(), leaves.end());
    leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
    for (NodeId leaf : leaves) {
      auto j = tree.leaf_index(leaf);
      if (!j) throw InputError("record '" + r.id + "' references node " + std::to_string(leaf) + ", not a leaf");
      ++s.leaf_histogram[*j];
      for (std::optional<NodeId> cur = leaf; cur && !covered[static_cast<std::size_t>(*cur)];
           cur = tree.node(*cur).parent)
        covered[static_cast<std::size_t>(*cur)] = true;
    }
    qs.push_back(r.quality);
    cs.push_back(r.complexity);
    in_range = in_range && r.quality >= 0.0 && r.quality <= 1.0 && r.complexity >= 0.0 && r.complexity <= 1.0;
    if (in_range) mix.push_back(composite_score(r.quality, r.complexity, alpha));
  }
  if (target) s.kl = kl_divergence(*target, s.leaf_histogram, epsilon);
  s.coverage.resize(static_cast<std::size_t>(tree.max_depth()) + 1);
  for (std::size_t d = 0; d < s.coverage.size(); ++d) s.coverage[d].depth = static_cast<int>(d);
  for (const auto& node : tree.nodes()) {
    auto& c = s.coverage[static_cast<std::size_t>(node.depth)];
    ++c.total;
    if (covered[static_cast<std::size_t>(node.id)]) ++c.covered;
  }
  if (!records.empty()) {
    s.quality = quantiles(qs);
    s.complexity = quantiles(cs);
    if (in_range) s.composite = quantiles(mix);
  }
  return s;
}

std::string format_stats(const SubsetStats& s, const TagTree& tree) {
  std::ostringstream out;
  out.precision(6);
  out << "records: " << s.records << '\n';
  out << "leaf_histogram: [";
  for (std::size_t j = 0; j < s.leaf_histogram.size(); ++j) out << (j ? ", " : "") << s.leaf_histogram[j];
  out << "]\n";
  out << "leaf_names: [";
  for (std::size_t j = 0; j < tree.leaf_count(); ++j) out << (j ? ", " : "") << tree.node(tree.leaves()[j]).name;
  out << "]\n";
  if (s.kl) out << "kl: " << *s.kl << '\n';
  for (const auto& c : s.coverage)
    out << "coverage depth " << c.depth << ": " << c.covered << "/" << c.total << '\n';
  auto put = [&](const char* label, const std::optional<Quantiles>& q) {
    if (!q) return;
    out << label << " quantiles (min/25/50/75/max): " << (*q)[0] << ' ' << (*q)[1] << ' ' << (*q)[2] << ' '
        << (*q)[3] << ' ' << (*q)[4] << '\n';
  };
  put("quality", s.quality);
  put("complexity", s.complexity);
  put("composite", s.composite);
  return out.str();
}

}  // namespace tagforest
