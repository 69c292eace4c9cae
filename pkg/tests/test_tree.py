import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgtree.tree import (
    LEFT,
    RIGHT,
    DecisionTree,
    Path,
    SplitCheck,
    TreeTopology,
    accuracy,
    path_correct_predictions,
    row_branch,
    row_follows_path,
    split_directions,
)

from conftest import make_dataset


def test_topology_counts():
    topo = TreeTopology(3)
    assert topo.num_internal == 7
    assert topo.num_leaves == 8
    assert list(topo.leaves) == list(range(7, 15))


@pytest.mark.parametrize(
    "depth,leaf,expected",
    [(2, 3, [0, 1]), (1, 1, [0]), (3, 12, [0, 2, 5])],
)
def test_path_nodes(depth, leaf, expected):
    assert TreeTopology(depth).path_nodes(leaf) == expected


@pytest.mark.parametrize(
    "depth,leaf,lc,rc",
    [(2, 3, {0, 1}, set()), (2, 4, {0}, {1}), (3, 12, {2}, {0, 5})],
)
def test_branch_sets(depth, leaf, lc, rc):
    got_lc, got_rc = TreeTopology(depth).branch_sets(leaf)
    assert got_lc == lc
    assert got_rc == rc


def test_leaf_validation():
    topo = TreeTopology(2)
    with pytest.raises(ValueError):
        topo.path_nodes(0)
    with pytest.raises(ValueError):
        topo.path_nodes(7)


def test_every_leaf_has_depth_ancestors():
    for k in range(1, 6):
        topo = TreeTopology(k)
        for leaf in topo.leaves:
            assert len(topo.path_nodes(leaf)) == k


class _R:
    def __init__(self, *features):
        self.features = np.array(features, dtype=float)


@pytest.mark.parametrize(
    "value,threshold,expected",
    [(1.0, 1.0, LEFT), (1.5, 1.0, RIGHT), (-3.0, 0.0, LEFT)],
)
def test_row_branch_boundary(value, threshold, expected):
    assert row_branch(_R(value), SplitCheck(0, 0, threshold)) == expected


def test_row_follows_path_depth1():
    topo = TreeTopology(1)
    splits = [SplitCheck(0, 0, 5.0)]
    left_path = Path(leaf=1, splits=(0,), target=0)
    assert row_follows_path(_R(3.0), left_path, topo, splits)
    assert not row_follows_path(_R(6.0), left_path, topo, splits)


def test_row_follows_path_depth2():
    topo = TreeTopology(2)
    splits = [SplitCheck(0, 0, 2.0), SplitCheck(1, 1, 7.0)]
    # Leaf 4: left at the root, right at node 1.
    path = Path(leaf=4, splits=(0, 1), target=0)
    assert row_follows_path(_R(1.0, 9.0), path, topo, splits)
    assert not row_follows_path(_R(1.0, 5.0), path, topo, splits)
    assert not row_follows_path(_R(3.0, 9.0), path, topo, splits)


def test_path_correct_predictions_empty_and_full():
    topo = TreeTopology(1)
    splits = [SplitCheck(0, 0, 0.5)]
    d = make_dataset([[0.0], [0.2], [0.4]], [1, 1, 1], num_classes=2)
    all_left = Path(leaf=1, splits=(0,), target=1)
    assert path_correct_predictions(all_left, d, topo, splits) == 3
    right = Path(leaf=2, splits=(0,), target=1)
    assert path_correct_predictions(right, d, topo, splits) == 0


def test_path_correct_predictions_weighted_toy():
    topo = TreeTopology(1)
    splits = [SplitCheck(0, 0, 1.5)]
    d = make_dataset(
        [[1.0], [1.2], [2.0], [0.3], [1.4], [5.0]],
        [0, 1, 0, 0, 0, 1],
        weights=[2, 3, 1, 4, 1, 5],
    )
    path = Path(leaf=1, splits=(0,), target=0)
    # Brute-force trace: rows with value <= 1.5 and target 0: ids 0, 3, 4.
    expected = sum(
        w for v, t, w in zip(d.features[:, 0], d.targets, d.weights)
        if v <= 1.5 and t == 0
    )
    assert expected == 7
    assert path_correct_predictions(path, d, topo, splits) == expected


def test_predict_and_accuracy_depth1():
    tree = DecisionTree(1, [0], [5.0], [0, 1])
    d = make_dataset([[3.0], [8.0]], [0, 1])
    assert tree.predict(d.row(0)) == 0
    assert tree.predict(d.row(1)) == 1
    assert accuracy(tree, d) == 1.0


def test_accuracy_all_same_class():
    tree = DecisionTree(2, [0, 0, 0], [0.5, 0.5, 0.5], [1, 1, 1, 1])
    d = make_dataset([[0.1], [0.9], [0.4]], [1, 1, 1], num_classes=2)
    assert accuracy(tree, d) == 1.0


def test_accuracy_matches_per_row_tally():
    rng = random.Random(3)
    feats = [[rng.random(), rng.random()] for _ in range(10)]
    targets = [rng.randrange(2) for _ in range(10)]
    weights = [rng.randint(1, 4) for _ in range(10)]
    d = make_dataset(feats, targets, weights)
    tree = DecisionTree(2, [0, 1, 1], [0.5, 0.3, 0.7], [0, 1, 1, 0])
    tally = sum(r.weight for r in d.rows if tree.predict(r) == r.target)
    assert accuracy(tree, d) == tally / d.total_weight


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.lists(st.floats(-5, 5), min_size=4, max_size=4),
       st.integers(0, 10**6))
def test_routing_total_function(depth, vec, seed):
    rng = random.Random(seed)
    topo = TreeTopology(depth)
    features = [rng.randrange(4) for _ in range(topo.num_internal)]
    thresholds = [round(rng.uniform(-5, 5), 3) for _ in range(topo.num_internal)]
    targets = [rng.randrange(3) for _ in range(topo.num_leaves)]
    tree = DecisionTree(depth, features, thresholds, targets)
    leaf = tree.route(np.array(vec))
    assert topo.is_leaf(leaf)
    # The routed leaf's path is followed, and no other leaf's path is.
    splits = [SplitCheck(i, features[j], thresholds[j])
              for i, j in enumerate(range(topo.num_internal))]
    row = _R(*vec)
    followed = []
    for lf in topo.leaves:
        nodes = topo.path_nodes(lf)
        path = Path(leaf=lf, splits=tuple(nodes), target=0)
        if row_follows_path(row, path, topo, splits):
            followed.append(lf)
    assert followed == [leaf]


def test_tree_selected_paths_cover_accuracy():
    # Summed CP over a tree's own paths equals weighted-correct of accuracy().
    rng = random.Random(11)
    d = make_dataset(
        [[rng.random(), rng.random()] for _ in range(30)],
        [rng.randrange(2) for _ in range(30)],
        [rng.randint(1, 3) for _ in range(30)],
    )
    tree = DecisionTree(2, [0, 1, 0], [0.5, 0.4, 0.6], [0, 1, 0, 1])
    topo = tree.topology
    splits = [SplitCheck(j, tree.features[j], tree.thresholds[j])
              for j in topo.internal_nodes]
    total = 0
    for leaf, _, target in tree.leaf_paths():
        path = Path(leaf=leaf, splits=tuple(topo.path_nodes(leaf)), target=target)
        total += path_correct_predictions(path, d, topo, splits)
    assert total == round(accuracy(tree, d) * d.total_weight)


def test_split_directions_matrix():
    d = make_dataset([[0.0, 1.0], [2.0, 0.5]], [0, 1])
    splits = [SplitCheck(0, 0, 1.0), SplitCheck(1, 1, 0.75)]
    m = split_directions(d, splits)
    assert m.tolist() == [[True, False], [False, True]]


def test_json_round_trip():
    tree = DecisionTree(2, [1, 0, 2], [0.5, -1.25, 3.0], [0, 2, 1, 0])
    text = tree.dumps()
    data = json.loads(text)
    assert list(data.keys()) == ["depth", "nodes", "leaves"]
    back = DecisionTree.loads(text)
    assert back.dumps() == text
    assert back.features == tree.features
    assert back.thresholds == tree.thresholds
    assert back.targets == tree.targets
