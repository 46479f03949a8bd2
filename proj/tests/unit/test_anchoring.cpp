#include "doctest.h"
#include "fixtures.hpp"
#include "synthetic.hpp"
#include "tagforest/anchoring.hpp"
#include "tagforest/matrices.hpp"

using namespace tagforest;

namespace {

Instance inst(std::string id, std::vector<std::string> tags) {
  return Instance{std::move(id), "q", "r", std::move(tags), 0.5, 0.5};
}

EmbeddingTable three_node_table() {
  EmbeddingTable t(2);
  t.insert("r", {1, 1});
  t.insert("l1", {1, 0});
  t.insert("l2", {0, 1});
  t.insert("vector", {0.99, 0.05});
  t.insert("matrix", {0.98, 0.1});
  t.insert("poem", {-1, -0.2});
  t.insert("between", {1, 1});
  return t;
}

}  // namespace

TEST_SUITE("anchoring") {
  TEST_CASE("tag equal to a leaf embedding activates it with similarity 1") {
    const auto tree = fixtures::three_node();
    EmbeddingTable t(2);
    t.insert("l1", {1, 0});
    t.insert("l2", {0, 1});
    t.insert("same_as_l1", {3, 0});
    LeafIndex index(tree, &t);
    auto p = anchor_instance(inst("a", {"same_as_l1"}), index, build_ancestry_matrix(tree));
    REQUIRE(p.matched.size() == 1);
    CHECK(p.matched[0].leaf == 1);
    CHECK(p.matched[0].similarity == doctest::Approx(1.0));
  }

  TEST_CASE("two tags on the same leaf activate it once") {
    const auto tree = fixtures::three_node();
    const auto t = three_node_table();
    LeafIndex index(tree, &t);
    auto p = anchor_instance(inst("a", {"vector", "matrix"}), index, build_ancestry_matrix(tree));
    CHECK(p.leaves == std::vector<std::size_t>{0});
    CHECK(p.tree_counts.at(0) == 1.0);
  }

  TEST_CASE("tree activation is M times leaf activation") {
    const auto tree = fixtures::three_node();
    LeafIndex index(tree, nullptr);
    auto p = anchor_instance(inst("a", {"l1"}), index, build_ancestry_matrix(tree));
    CHECK(p.tree_counts.index == std::vector<NodeId>{0, 1});
    CHECK(p.tree_counts.value == std::vector<double>{1, 1});
    auto both = anchor_instance(inst("b", {"l1", "l2"}), index, build_ancestry_matrix(tree));
    CHECK(both.tree_counts.at(0) == 2.0);
  }

  TEST_CASE("ties go to the lowest leaf and weak tags are dropped") {
    const auto tree = fixtures::three_node();
    const auto t = three_node_table();
    LeafIndex index(tree, &t);
    const auto m = build_ancestry_matrix(tree);
    auto tie = anchor_instance(inst("a", {"between"}), index, m);
    CHECK(tie.leaves == std::vector<std::size_t>{0});
    auto weak = anchor_instance(inst("b", {"poem"}), index, m);
    CHECK(!weak.anchorable());
    CHECK(weak.dropped == std::vector<std::string>{"poem"});
  }

  TEST_CASE("pool anchoring") {
    const auto tree = fixtures::three_node();
    const auto t = three_node_table();
    std::vector<Instance> verbatim{inst("a", {"l1"}), inst("b", {"l2", "l1"})};
    auto ok = anchor_pool(verbatim, tree, &t);
    CHECK(ok.profiles.size() == 2);
    CHECK(ok.report.empty());
    CHECK(ok.profiles[1].instance_id == "b");

    std::vector<Instance> weak{inst("a", {"l1"}), inst("z", {"poem"})};
    auto out = anchor_pool(weak, tree, &t);
    CHECK(out.report.mentions("unanchorable"));
    CHECK(out.report.mentions("'z'"));
    auto recs = to_records(weak, out.profiles, tree);
    CHECK(recs[1].leaves.empty());
    CHECK(recs[0].leaves == std::vector<NodeId>{1});

    auto none = anchor_pool({}, tree, &t);
    CHECK(none.profiles.empty());
    CHECK(none.report.empty());
  }

  TEST_CASE("profile invariants and worker independence on random pools") {
    synth::Rng rng(3);
    const auto tree = synth::random_tree(rng, 60);
    EmbeddingTable table(8);
    std::vector<Instance> pool;
    std::normal_distribution<double> n(0, 1);
    for (int i = 0; i < 300; ++i) {
      std::vector<std::string> tags;
      for (int k = 0; k < 3; ++k) {
        std::string tag = "tag" + std::to_string(i) + "_" + std::to_string(k);
        std::vector<double> v(8);
        for (auto& x : v) x = n(rng);
        table.insert(tag, v);
        tags.push_back(tag);
      }
      pool.push_back(inst("i" + std::to_string(i), tags));
    }
    const auto m = build_ancestry_matrix(tree);
    auto one = anchor_pool(pool, tree, &table, 0.1, 1);
    auto four = anchor_pool(pool, tree, &table, 0.1, 4);
    REQUIRE(one.profiles.size() == pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
      const auto& p = one.profiles[i];
      CHECK(p.leaves == four.profiles[i].leaves);
      CHECK(p.leaves.size() <= pool[i].tags.size());
      CHECK(p.tree_counts == m.multiply(p.leaves));
      for (auto j : p.leaves) CHECK(p.tree_counts.at(tree.leaves()[j]) == 1.0);
      if (p.anchorable()) CHECK(p.tree_counts.at(0) == static_cast<double>(p.leaves.size()));
    }
    CHECK(one.report.to_string() == four.report.to_string());
  }
}
