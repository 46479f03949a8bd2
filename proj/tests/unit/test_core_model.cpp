#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "synthetic.hpp"
#include "tagforest/error.hpp"
#include "tagforest/matrices.hpp"

using namespace tagforest;

namespace {

std::vector<TreeNode> raw_three_node() {
  return {TreeNode{0, "r", std::nullopt, {1, 2}, 0, std::nullopt},
          TreeNode{1, "l1", 0, {}, 1, std::nullopt},
          TreeNode{2, "l2", 0, {}, 1, std::nullopt}};
}

std::vector<std::vector<int>> dense(const AncestryMatrix& m) {
  std::vector<std::vector<int>> out(m.rows(), std::vector<int>(m.cols(), 0));
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (NodeId i : m.column(j)) out[static_cast<std::size_t>(i)][j] = 1;
  return out;
}

}  // namespace

TEST_SUITE("core-model") {
  TEST_CASE("single root with two leaf children validates cleanly") {
    CHECK(validate_tree(raw_three_node()).empty());
  }

  TEST_CASE("child whose parent points elsewhere is an inconsistency") {
    auto nodes = raw_three_node();
    nodes.push_back(TreeNode{3, "l3", 1, {}, 2, std::nullopt});
    nodes[1].children = {};  // l3 claims l1 as parent but l1 does not list it
    nodes[2].children = {3};  // and l2 lists l3
    auto report = validate_tree(nodes);
    CHECK(report.has_errors());
    CHECK(report.mentions("inconsistent link"));
  }

  TEST_CASE("two parentless nodes report multiple roots") {
    auto nodes = raw_three_node();
    nodes[2].parent.reset();
    nodes[2].depth = 0;
    nodes[0].children = {1};
    auto report = validate_tree(nodes);
    CHECK(report.mentions("multiple roots"));
  }

  TEST_CASE("empty node list, cycles and bad depths are rejected") {
    CHECK(validate_tree({}).mentions("empty node list"));

    // 0 is a root; 1 and 2 point at each other.
    std::vector<TreeNode> cyc{TreeNode{0, "r", std::nullopt, {}, 0, std::nullopt},
                              TreeNode{1, "a", 2, {2}, 1, std::nullopt},
                              TreeNode{2, "b", 1, {1}, 2, std::nullopt}};
    CHECK(validate_tree(cyc).mentions("cycle"));

    auto nodes = raw_three_node();
    nodes[2].depth = 3;
    CHECK(validate_tree(nodes).mentions("depth"));

    auto deep = raw_three_node();
    CHECK(validate_tree(deep, TreeLimits{0}).mentions("exceeds limit"));
  }

  TEST_CASE("from_nodes throws with the report attached") {
    auto nodes = raw_three_node();
    nodes[1].parent = 2;
    try {
      (void)TagTree::from_nodes(nodes);
      FAIL("expected InvalidTreeError");
    } catch (const InvalidTreeError& e) {
      CHECK(e.report().has_errors());
    }
  }

  TEST_CASE("parent links are canonicalized breadth-first") {
    // Input order puts a grandchild first.
    std::vector<std::optional<std::size_t>> parents{2, std::nullopt, 1, 1};
    auto t = TagTree::from_parent_links({"leaf_a", "root", "mid", "leaf_b"}, parents);
    REQUIRE(t.size() == 4);
    CHECK(t.node(0).name == "root");
    CHECK(t.node(1).name == "mid");
    CHECK(t.node(2).name == "leaf_b");
    CHECK(t.node(3).name == "leaf_a");
    CHECK(t.leaves() == std::vector<NodeId>{2, 3});
    CHECK(t.max_depth() == 2);
    CHECK(validate_tree(t.nodes()).empty());
  }

  TEST_CASE("ancestry matrix of the 3-node tree") {
    const auto m = build_ancestry_matrix(fixtures::three_node());
    CHECK(dense(m) == std::vector<std::vector<int>>{{1, 1}, {1, 0}, {0, 1}});
  }

  TEST_CASE("single-node tree has M = [[1]] and A = [[1]]") {
    const auto t = fixtures::single();
    CHECK(dense(build_ancestry_matrix(t)) == std::vector<std::vector<int>>{{1}});
    const auto a = build_propagation_matrix(t);
    CHECK(a.size() == 1);
    CHECK(a.at(0, 0) == 1.0);
  }

  TEST_CASE("chain column is the full path") {
    const auto m = build_ancestry_matrix(fixtures::chain());
    REQUIRE(m.cols() == 1);
    CHECK(std::vector<NodeId>(m.column(0).begin(), m.column(0).end()) == std::vector<NodeId>{0, 1, 2});
  }

  TEST_CASE("propagation rows of the 3-node tree") {
    const auto a = build_propagation_matrix(fixtures::three_node());
    for (NodeId q = 0; q < 3; ++q) CHECK(a.at(0, q) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(a.at(1, 0) == 0.5);
    CHECK(a.at(1, 1) == 0.5);
    CHECK(a.at(1, 2) == 0.0);
  }

  TEST_CASE("star root row is uniform") {
    const std::size_t k = 7;
    const auto a = build_propagation_matrix(fixtures::star(k));
    for (NodeId q = 0; q <= static_cast<NodeId>(k); ++q) CHECK(a.at(0, q) == doctest::Approx(1.0 / (k + 1)));
  }

  TEST_CASE("random-tree matrix invariants") {
    synth::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
      std::uniform_int_distribution<std::size_t> sz(1, 120);
      const auto t = synth::random_tree(rng, sz(rng));
      const auto m = build_ancestry_matrix(t);
      const auto a = build_propagation_matrix(t);
      for (std::size_t j = 0; j < t.leaf_count(); ++j) {
        const NodeId leaf = t.leaves()[j];
        CHECK(m.column(j).size() == static_cast<std::size_t>(t.node(leaf).depth) + 1);
        for (std::size_t j2 = 0; j2 < t.leaf_count(); ++j2) CHECK(m.contains(t.leaves()[j2], j) == (j == j2));
      }
      for (std::size_t p = 0; p < a.size(); ++p) {
        double sum = 0.0;
        for (double v : a.row_values(p)) {
          CHECK(v > 0.0);
          sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(a.row_columns(p).size() == t.neighbors(static_cast<NodeId>(p)).size() + 1);
      }
      // Pure and deterministic.
      CHECK(build_propagation_matrix(t).row_values(0).size() == a.row_values(0).size());
    }
  }

  TEST_CASE("sparse products match their definitions") {
    const auto t = fixtures::three_node();
    const auto m = build_ancestry_matrix(t);
    const std::vector<std::size_t> both{0, 1};
    const auto h = m.multiply(both);
    CHECK(h.index == std::vector<NodeId>{0, 1, 2});
    CHECK(h.value == std::vector<double>{2.0, 1.0, 1.0});

    const auto a = build_propagation_matrix(t);
    const std::vector<double> x{1.0, 0.0, 0.0};
    const auto y = a.multiply(x);
    CHECK(y[0] == doctest::Approx(1.0 / 3.0));
    CHECK(y[1] == 0.5);
    const auto z = a.left_multiply(x);
    CHECK(z[1] == doctest::Approx(1.0 / 3.0));
  }
}
