import itertools
import random

import pytest

from cgtree.preprocess import merge_duplicate_rows, reachable_nodes
from cgtree.tree import LEFT, Path, TreeTopology, path_correct_predictions, row_branch

from conftest import make_candidates, make_dataset, random_dataset


def reachable_oracle(row, cand, topo):
    """Trace every full split assignment and collect visited nodes."""
    per_node = [cand.node_splits(j) for j in topo.internal_nodes]
    seen = {0}
    for assignment in itertools.product(*per_node):
        j = 0
        while not topo.is_leaf(j):
            sid = assignment[j]
            left, right = topo.children(j)
            j = left if row_branch(row, cand.split(sid)) == LEFT else right
            seen.add(j)
    return seen


def test_root_always_reachable():
    cand = make_candidates([[(0, 1.0)]])
    d = make_dataset([[5.0]], [0])
    assert 0 in reachable_nodes(d.row(0), cand, TreeTopology(1))


def test_one_sided_candidates_block_child():
    cand = make_candidates([[(0, 10.0)], [(0, 10.0)], [(0, 10.0)]])
    d = make_dataset([[3.0]], [0])
    reached = reachable_nodes(d.row(0), cand, TreeTopology(2))
    assert 2 not in reached          # right child needs v > 10
    assert reached == {0, 1, 3}      # straight left spine


def test_reachable_matches_enumeration():
    rng = random.Random(21)
    topo = TreeTopology(2)
    for _ in range(25):
        d = random_dataset(rng, max_rows=6, max_features=2)
        pairs = [
            [(rng.randrange(d.num_features), rng.choice([0.5, 1.5, 2.5]))
             for _ in range(rng.randint(1, 3))]
            for _ in topo.internal_nodes
        ]
        cand = make_candidates(pairs)
        for row in d.rows:
            assert reachable_nodes(row, cand, topo) == reachable_oracle(row, cand, topo)


def test_merge_exact_duplicates():
    d = make_dataset([[1.0], [1.0]], [0, 0], num_classes=2)
    cand = make_candidates([[(0, 0.5)]])
    merged = merge_duplicate_rows(d, cand, TreeTopology(1))
    assert merged.num_rows == 1
    assert merged.weights[0] == 2


def test_merge_ignores_unseen_feature():
    # Feature 1 appears in no candidate, so rows differing only there merge.
    d = make_dataset([[1.0, 5.0], [1.0, 9.0]], [0, 0], num_classes=2)
    cand = make_candidates([[(0, 0.5)]])
    merged = merge_duplicate_rows(d, cand, TreeTopology(1))
    assert merged.num_rows == 1


def test_merge_requires_same_target():
    d = make_dataset([[1.0], [1.0]], [0, 1])
    cand = make_candidates([[(0, 0.5)]])
    merged = merge_duplicate_rows(d, cand, TreeTopology(1))
    assert merged.num_rows == 2


def test_merge_conserves_weight_and_cp():
    rng = random.Random(31)
    topo = TreeTopology(2)
    for _ in range(15):
        d = random_dataset(rng, max_rows=30, max_features=2)
        pairs = [
            [(rng.randrange(d.num_features), rng.choice([0.5, 1.5, 2.5]))
             for _ in range(rng.randint(1, 3))]
            for _ in topo.internal_nodes
        ]
        cand = make_candidates(pairs)
        merged = merge_duplicate_rows(d, cand, topo)
        assert merged.total_weight == d.total_weight
        # CP of every representable path is invariant under merging.
        for leaf in topo.leaves:
            nodes = topo.path_nodes(leaf)
            for sids in itertools.product(*(cand.node_splits(j) for j in nodes)):
                for target in range(d.num_classes):
                    p = Path(leaf=leaf, splits=tuple(sids), target=target)
                    before = path_correct_predictions(p, d, topo, cand.splits)
                    after = path_correct_predictions(p, merged, topo, cand.splits)
                    assert before == after


def test_merge_keeps_lowest_id_representative():
    d = make_dataset([[1.0], [2.0], [1.0]], [0, 0, 0], num_classes=2)
    cand = make_candidates([[(0, 1.5)]])
    merged = merge_duplicate_rows(d, cand, TreeTopology(1))
    assert merged.num_rows == 2
    assert merged.features[0, 0] == 1.0
    assert merged.weights[0] == 2
    assert merged.features[1, 0] == 2.0
