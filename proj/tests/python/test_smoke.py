import json
import math

import pytest

import tagforest as tf


@pytest.fixture
def three_node():
    return tf.TagTree.from_parents(["r", "l1", "l2"], [None, 0, 0])


def test_matrices(three_node):
    assert tf.ancestry_matrix(three_node) == [[1, 1], [1, 0], [0, 1]]
    a = tf.propagation_matrix(three_node)
    assert a[0] == pytest.approx([1 / 3] * 3)
    assert a[1] == [0.5, 0.5, 0.0]
    assert all(math.isclose(sum(row), 1.0, abs_tol=1e-12) for row in a)


def test_singleton_information(three_node):
    info = tf.subset_information(three_node, [[1]], [1.0], gamma=0.85)
    assert info == pytest.approx(2.263256310138458, abs=1e-12)
    assert tf.subset_information(three_node, [], []) == 0.0
    assert tf.composite_score(0.9, 0.4) == pytest.approx(0.8)


def test_tree_round_trip(three_node, tmp_path):
    text = three_node.to_json()
    assert tf.TagTree.from_json(text) == three_node
    path = tmp_path / "tree.json"
    three_node.save(path)
    assert tf.TagTree.load(path).to_json() == text
    assert json.loads(text)["nodes"][0]["name"] == "r"


def test_invalid_input_raises_value_error(three_node):
    with pytest.raises(ValueError):
        tf.TagTree.from_parents(["a", "b"], [None, None])
    with pytest.raises(ValueError, match="aligned mode requires target"):
        tf.sample([tf.AnchoredRecord("a", [1], 0.5, 0.5)], three_node, 1, lambda_=5.0)


def test_sampling(three_node):
    pool = [tf.AnchoredRecord(i, [1], 0.9, 0.9) for i in "abc"] + [tf.AnchoredRecord("d", [2], 0.9, 0.9)]
    out = tf.sample(pool, three_node, 2)
    assert out["ids"] == ["a", "d"]
    assert out["final_information"] == pytest.approx(3.7487795174989014, rel=1e-12)
    assert out["final_kl"] is None

    aligned = tf.sample(pool, three_node, 2, lambda_=100.0, target={"l2": 1.0})
    assert aligned["ids"][0] == "d"
    assert aligned["final_kl"] is not None


def test_anchor_and_target(three_node):
    pool = [tf.Instance("x", ["l1"], 0.5, 0.5), tf.Instance("y", ["l1", "l2"], 0.5, 0.5),
            tf.Instance("z", ["nothing"], 0.5, 0.5)]
    emb = {"l1": [1.0, 0.0], "l2": [0.0, 1.0], "nothing": [-1.0, -1.0]}
    recs = tf.anchor(pool, three_node, emb)
    assert [r.leaves for r in recs] == [[1], [1, 2], []]
    assert tf.derive_target(recs, three_node) == {"l1": pytest.approx(2 / 3), "l2": pytest.approx(1 / 3)}
    assert tf.stats(recs, three_node)["leaf_histogram"] == [2, 1]


def test_build_tree():
    tags = [f"a{i}" for i in range(5)] + [f"b{i}" for i in range(5)]
    emb = {t: ([1.0, 0.01 * i] if t[0] == "a" else [0.01 * i, 1.0]) for i, t in enumerate(tags)}
    tree = tf.build_tree(tags, emb, depth=3, clusters=2, seed=1)
    assert sorted(tree.names[j] for j in tree.leaves) == sorted(tags)
    assert tree.max_depth == 2
