"""Row reachability over candidate splits and duplicate-row merging."""

from __future__ import annotations

import numpy as np

from .dataset import Dataset
from .greedy import CandidateSplits
from .tree import LEFT, TreeTopology, row_branch


def reachable_nodes(row, candidates: CandidateSplits, topo: TreeTopology) -> set[int]:
    """All nodes the row can reach under some assignment of candidate splits.

    The root is always reachable; a child is reachable iff some candidate at
    the (reachable) parent sends the row toward it.
    """
    reached = {0}
    frontier = [0]
    while frontier:
        j = frontier.pop()
        if topo.is_leaf(j):
            continue
        left, right = topo.children(j)
        can_left = False
        can_right = False
        for sid in candidates.node_splits(j):
            if row_branch(row, candidates.split(sid)) == LEFT:
                can_left = True
            else:
                can_right = True
            if can_left and can_right:
                break
        for child, ok in ((left, can_left), (right, can_right)):
            if ok and child not in reached:
                reached.add(child)
                frontier.append(child)
    return reached


def _branch_signature(row, candidates: CandidateSplits, topo: TreeTopology) -> tuple:
    """Directions taken on every candidate split of the row's reachable
    internal nodes; rows with different reachable sets never compare equal."""
    internal = sorted(
        j for j in reachable_nodes(row, candidates, topo) if not topo.is_leaf(j)
    )
    return tuple(
        (j, tuple(int(row_branch(row, candidates.split(sid))) for sid in candidates.node_splits(j)))
        for j in internal
    )


def merge_duplicate_rows(
    dataset: Dataset, candidates: CandidateSplits, topo: TreeTopology
) -> Dataset:
    """Collapse rows that share a target and a branch signature.

    Each group keeps its lowest-id row and accumulates the group's weight, so
    the total weight and every path's correct-prediction count are unchanged.
    """
    groups: dict[tuple, int] = {}
    keep: list[int] = []
    weights = dataset.weights.copy()
    for row in dataset.rows:
        key = (row.target, _branch_signature(row, candidates, topo))
        rep = groups.get(key)
        if rep is None:
            groups[key] = row.id
            keep.append(row.id)
        else:
            weights[rep] += row.weight
    return Dataset(
        dataset.features[keep],
        dataset.targets[keep],
        weights[np.array(keep, dtype=int)],
        dataset.class_names,
    )
