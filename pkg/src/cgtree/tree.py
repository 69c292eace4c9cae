"""Complete binary tree topology, split checks, paths and row routing.

Nodes are numbered in level order: internal nodes 0 .. 2^k - 2, leaves
2^k - 1 .. 2^(k+1) - 2, children of node j are (2j+1, 2j+2).  A row with
feature value v goes LEFT on a split (f, mu) iff v <= mu.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np


class Direction(IntEnum):
    LEFT = 0
    RIGHT = 1


LEFT = Direction.LEFT
RIGHT = Direction.RIGHT


@dataclass(frozen=True)
class SplitCheck:
    """A univariate test: rows with value <= threshold branch left."""

    id: int
    feature: int
    threshold: float

    def __post_init__(self):
        if not np.isfinite(self.threshold):
            raise ValueError(f"split threshold must be finite, got {self.threshold}")


class TreeTopology:
    """Index arithmetic for a complete binary tree of a fixed depth."""

    def __init__(self, depth: int):
        if depth < 1:
            raise ValueError(f"tree depth must be >= 1, got {depth}")
        self.depth = depth
        self.num_internal = 2**depth - 1
        self.num_leaves = 2**depth
        self.internal_nodes = range(self.num_internal)
        self.leaves = range(self.num_internal, self.num_internal + self.num_leaves)

    def is_leaf(self, node: int) -> bool:
        return self.num_internal <= node < self.num_internal + self.num_leaves

    def children(self, node: int) -> tuple[int, int]:
        return 2 * node + 1, 2 * node + 2

    def parent(self, node: int) -> int:
        return (node - 1) // 2

    def level(self, node: int) -> int:
        return int(node + 1).bit_length() - 1

    def path_nodes(self, leaf: int) -> list[int]:
        """Internal ancestors of ``leaf``, root first."""
        self._check_leaf(leaf)
        nodes = []
        j = leaf
        while j > 0:
            j = self.parent(j)
            nodes.append(j)
        nodes.reverse()
        return nodes

    def path_directions(self, leaf: int) -> list[Direction]:
        """Branch taken at each ancestor on the way to ``leaf``, root first."""
        self._check_leaf(leaf)
        dirs = []
        j = leaf
        while j > 0:
            p = self.parent(j)
            dirs.append(LEFT if j == 2 * p + 1 else RIGHT)
            j = p
        dirs.reverse()
        return dirs

    def branch_sets(self, leaf: int) -> tuple[set[int], set[int]]:
        """Partition of the ancestors of ``leaf`` into (left-child, right-child) sets."""
        nodes = self.path_nodes(leaf)
        dirs = self.path_directions(leaf)
        lc = {j for j, d in zip(nodes, dirs) if d == LEFT}
        rc = {j for j, d in zip(nodes, dirs) if d == RIGHT}
        return lc, rc

    def leaves_below(self, node: int) -> list[int]:
        if self.is_leaf(node):
            return [node]
        lo, hi = self.children(node)
        return self.leaves_below(lo) + self.leaves_below(hi)

    def _check_leaf(self, leaf: int) -> None:
        if not self.is_leaf(leaf):
            raise ValueError(f"node {leaf} is not a leaf of a depth-{self.depth} tree")


@dataclass(frozen=True)
class Path:
    """A column: one split per ancestor of ``leaf`` (root first) plus a target.

    ``splits`` holds split-check ids into a split universe.  ``correct`` caches
    the weighted count of rows that follow the path and match its target; it is
    filled in when the path is scored against a dataset.
    """

    leaf: int
    splits: tuple[int, ...]
    target: int
    correct: int = 0
    id: int = -1

    def key(self) -> tuple:
        return (self.leaf, self.splits, self.target)


def row_branch(row, split: SplitCheck) -> Direction:
    """Branch taken by a row on a split check (<= goes left)."""
    return LEFT if row.features[split.feature] <= split.threshold else RIGHT


def row_follows_path(row, path: Path, topo: TreeTopology, splits) -> bool:
    """True iff the row's branch at every ancestor points along the path."""
    dirs = topo.path_directions(path.leaf)
    for sid, d in zip(path.splits, dirs):
        if row_branch(row, splits[sid]) != d:
            return False
    return True


def path_correct_predictions(path: Path, dataset, topo: TreeTopology, splits) -> int:
    """Weighted count of rows that follow ``path`` and match its target."""
    total = 0
    for row in dataset.rows:
        if row.target == path.target and row_follows_path(row, path, topo, splits):
            total += row.weight
    return total


def split_directions(dataset, splits) -> np.ndarray:
    """Boolean matrix [row, split] with True where the row branches LEFT."""
    n = dataset.num_rows
    out = np.empty((n, len(splits)), dtype=bool)
    for idx, s in enumerate(splits):
        out[:, idx] = dataset.features[:, s.feature] <= s.threshold
    out.setflags(write=False)
    return out


@dataclass
class DecisionTree:
    """A complete depth-k tree: one (feature, threshold) per internal node and a
    class index per leaf."""

    depth: int
    features: list[int]
    thresholds: list[float]
    targets: list[int]
    topology: TreeTopology = field(init=False, repr=False)

    def __post_init__(self):
        self.topology = TreeTopology(self.depth)
        if len(self.features) != self.topology.num_internal:
            raise ValueError("one split per internal node required")
        if len(self.thresholds) != self.topology.num_internal:
            raise ValueError("one threshold per internal node required")
        if len(self.targets) != self.topology.num_leaves:
            raise ValueError("one target per leaf required")

    def route(self, features) -> int:
        """Leaf id reached by a feature vector."""
        j = 0
        while j < self.topology.num_internal:
            left, right = self.topology.children(j)
            j = left if features[self.features[j]] <= self.thresholds[j] else right
        return j

    def predict(self, row) -> int:
        return self.targets[self.route(row.features) - self.topology.num_internal]

    def leaf_paths(self) -> list[tuple[int, list[tuple[int, float]], int]]:
        """Decompose into 2^k (leaf, [(feature, threshold) root-first], target)."""
        out = []
        for leaf in self.topology.leaves:
            nodes = self.topology.path_nodes(leaf)
            checks = [(self.features[j], self.thresholds[j]) for j in nodes]
            out.append((leaf, checks, self.targets[leaf - self.topology.num_internal]))
        return out

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "nodes": [
                {"id": j, "feature": self.features[j], "threshold": self.thresholds[j]}
                for j in self.topology.internal_nodes
            ],
            "leaves": [
                {"id": leaf, "target": self.targets[i]}
                for i, leaf in enumerate(self.topology.leaves)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "DecisionTree":
        depth = data["depth"]
        topo = TreeTopology(depth)
        features = [0] * topo.num_internal
        thresholds = [0.0] * topo.num_internal
        targets = [0] * topo.num_leaves
        for node in data["nodes"]:
            features[node["id"]] = node["feature"]
            thresholds[node["id"]] = float(node["threshold"])
        for leaf in data["leaves"]:
            targets[leaf["id"] - topo.num_internal] = leaf["target"]
        return cls(depth, features, thresholds, targets)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @classmethod
    def loads(cls, text: str) -> "DecisionTree":
        return cls.from_json(json.loads(text))


def predict(tree: DecisionTree, row) -> int:
    return tree.predict(row)


def accuracy(tree: DecisionTree, dataset) -> float:
    """Weighted fraction of rows whose predicted class matches their target."""
    correct = 0
    for row in dataset.rows:
        if tree.predict(row) == row.target:
            correct += row.weight
    return correct / dataset.total_weight
