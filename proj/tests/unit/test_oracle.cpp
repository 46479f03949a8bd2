#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracle.hpp"
#include "synthetic.hpp"
#include "tagforest/matrices.hpp"
#include "tagforest/objective.hpp"
#include "tagforest/sampler.hpp"

using namespace tagforest;

namespace {

double engine_information(const TagTree& tree, const std::vector<oracle::Item>& items, double gamma) {
  const auto m = build_ancestry_matrix(tree);
  const auto a = build_propagation_matrix(tree);
  std::vector<SparseVector> es;
  for (const auto& it : items) {
    std::vector<std::size_t> cols;
    for (auto l : it.leaves) cols.push_back(*tree.leaf_index(l));
    std::sort(cols.begin(), cols.end());
    es.push_back(raw_info_vector(it.score, m.multiply(cols)));
  }
  return subset_information(es, a, gamma);
}

std::vector<AnchoredRecord> as_records(const std::vector<oracle::Item>& items) {
  std::vector<AnchoredRecord> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "i%03zu", i);
    out.push_back({id, items[i].leaves, {}, items[i].score, items[i].score});
  }
  return out;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("empty subset and the 3-node singleton") {
    const auto t = fixtures::three_node();
    CHECK(oracle::exact_information(t, {}, 0.85) == 0.0L);
    CHECK(std::abs(static_cast<double>(oracle::exact_information(t, {{{1}, 1.0}}, 0.85)) - 2.2633) < 1e-4);
  }

  TEST_CASE("oracle and engine agree on random subsets") {
    synth::Rng rng(101);
    for (int trial = 0; trial < 40; ++trial) {
      const auto t = synth::random_tree(rng, 35);
      auto pool = synth::random_items(rng, t, 50, 4);
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(std::uniform_int_distribution<std::size_t>(0, 20)(rng));
      const double ref = static_cast<double>(oracle::exact_information(t, pool, 0.85));
      const double got = engine_information(t, pool, 0.85);
      CHECK(std::abs(got - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
    }
  }

  TEST_CASE("exact marginal gain") {
    const auto t = fixtures::three_node();
    const oracle::Item one{{1}, 1.0};
    const auto dup = oracle::exact_marginal_gain(t, {one}, one, 0.85);
    CHECK(dup > 0.0L);
    CHECK(dup < oracle::exact_information(t, {one}, 0.85));
    CHECK(oracle::exact_marginal_gain(t, {one}, {{2}, 0.0}, 0.85) == 0.0L);
  }

  TEST_CASE("exhaustive optimum on the four-instance pool") {
    const auto t = fixtures::three_node();
    // Three l1 copies at s = 0.9 and one l2 instance at s = 0.5: the best pair
    // is two l1 copies.
    std::vector<oracle::Item> pool{{{1}, 0.9}, {{1}, 0.9}, {{1}, 0.9}, {{2}, 0.5}};
    auto best = oracle::exhaustive_optimum(t, pool, 2, {});
    CHECK(best.members == std::vector<std::size_t>{0, 1});
    CHECK(static_cast<double>(best.value) == doctest::Approx(3.7300561479926696).epsilon(1e-14));
    CHECK(static_cast<double>(oracle::exact_information(t, {pool[0], pool[3]}, 0.85)) ==
          doctest::Approx(3.0265219954536805).epsilon(1e-14));

    // At equal scores the l2 instance completes the best pair.
    pool[3].score = 0.9;
    best = oracle::exhaustive_optimum(t, pool, 2, {});
    CHECK(best.members == std::vector<std::size_t>{0, 3});
    CHECK(static_cast<double>(best.value) == doctest::Approx(3.7487795174989014).epsilon(1e-14));

    auto none = oracle::exhaustive_optimum(t, pool, 0, {});
    CHECK(none.members.empty());
    CHECK(none.value == 0.0L);
    CHECK(oracle::exhaustive_optimum(t, pool, 4, {}).members == std::vector<std::size_t>{0, 1, 2, 3});
  }

  TEST_CASE("exhaustive optimum refuses huge enumerations and ignores pool order") {
    const auto t = fixtures::three_node();
    std::vector<oracle::Item> big(40, oracle::Item{{1}, 0.5});
    CHECK_THROWS_AS(oracle::exhaustive_optimum(t, big, 20, {}), std::length_error);

    synth::Rng rng(7);
    const auto tree = synth::random_tree(rng, 20);
    auto pool = synth::random_items(rng, tree, 9, 3);
    const auto v1 = oracle::exhaustive_optimum(tree, pool, 3, {}).value;
    std::reverse(pool.begin(), pool.end());
    CHECK(std::abs(static_cast<double>(v1 - oracle::exhaustive_optimum(tree, pool, 3, {}).value)) <= 1e-12);
  }

  TEST_CASE("greedy_exact reaches the (1 - 1/e) bound") {
    synth::Rng rng(55);
    for (int trial = 0; trial < 5; ++trial) {
      const auto tree = synth::random_tree(rng, 25);
      auto pool = synth::random_items(rng, tree, 10, 3);
      const auto opt = oracle::exhaustive_optimum(tree, pool, 3, {});
      const auto g = oracle::exact_information(tree, oracle::select(pool, oracle::greedy_exact(tree, pool, 3, {})), 0.85);
      CHECK(g >= (1.0L - std::exp(-1.0L)) * opt.value);
    }
  }

  TEST_CASE("disjoint leaves at equal score: greedy_exact and the sampler agree") {
    const auto tree = fixtures::star(6);
    std::vector<oracle::Item> pool;
    for (NodeId l = 1; l <= 6; ++l) pool.push_back({{l}, 0.6});
    auto recs = as_records(pool);
    SamplerConfig cfg;
    cfg.budget = 4;
    auto r = tagforest::sample(recs, tree, cfg);
    auto g = oracle::greedy_exact(tree, pool, 4, {});
    std::set<std::size_t> a(r.selected.begin(), r.selected.end()), b(g.begin(), g.end());
    CHECK(a == b);
  }

  TEST_CASE("selection overlap between greedy_exact and the sampler") {
    // Frozen regression thresholds measured on these seeded pools: mean
    // overlap at least 80% of the budget, no single pool below 7 of 10.
    synth::Rng rng(2024);
    std::size_t total = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto tree = synth::random_tree(rng, 40);
      auto pool = synth::random_items(rng, tree, 40, 3);
      auto recs = as_records(pool);
      SamplerConfig cfg;
      cfg.budget = 10;
      auto r = tagforest::sample(recs, tree, cfg);
      auto g = oracle::greedy_exact(tree, pool, 10, {});
      std::set<std::size_t> a(r.selected.begin(), r.selected.end());
      std::size_t common = 0;
      for (auto i : g) common += a.count(i);
      CHECK(common >= 7);
      total += common;
    }
    CHECK(total >= 160);
  }
}
