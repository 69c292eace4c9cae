"""Greedy Gini tree fitting: the baseline learner, the threshold-sampling
procedure that builds per-node candidate split sets, and the initial columns
harvested from greedy runs."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .tree import DecisionTree, Path, SplitCheck, TreeTopology


@dataclass(frozen=True)
class CandidateSplits:
    """Global split universe plus the per-internal-node candidate id sets."""

    splits: tuple[SplitCheck, ...]
    per_node: tuple[tuple[int, ...], ...]

    def node_splits(self, node: int) -> tuple[int, ...]:
        return self.per_node[node]

    def split(self, split_id: int) -> SplitCheck:
        return self.splits[split_id]

    def allows(self, node: int, split_id: int) -> bool:
        return split_id in self.per_node[node]

    @property
    def universe_size(self) -> int:
        return len(self.splits)

    def id_of(self, feature: int, threshold: float) -> int | None:
        key = (feature, threshold)
        return self._pair_index().get(key)

    def _pair_index(self) -> dict:
        if not hasattr(self, "_pairs"):
            object.__setattr__(
                self, "_pairs", {(s.feature, s.threshold): s.id for s in self.splits}
            )
        return self._pairs


def _weighted_class_counts(targets, weights, num_classes):
    return np.bincount(targets, weights=weights, minlength=num_classes)


def best_gini_split(features, targets, weights, num_classes):
    """Minimum weighted-Gini split over all (feature, midpoint) candidates.

    Thresholds are midpoints between consecutive distinct sorted values of a
    feature.  Ties are broken toward the lower feature index and then the
    lower threshold.  Returns (feature, threshold) or None when no candidate
    separates the rows.
    """
    n, num_features = features.shape
    best = None
    best_impurity = math.inf
    for f in range(num_features):
        order = np.argsort(features[:, f], kind="stable")
        vals = features[order, f]
        if vals[0] == vals[-1]:
            continue
        w = weights[order].astype(float)
        onehot = np.zeros((n, num_classes))
        onehot[np.arange(n), targets[order]] = w
        prefix = np.cumsum(onehot, axis=0)
        cut_positions = np.nonzero(vals[:-1] < vals[1:])[0]
        left = prefix[cut_positions]
        total = prefix[-1]
        right = total - left
        wl = left.sum(axis=1)
        wr = right.sum(axis=1)
        # Weighted impurity W_L*G_L + W_R*G_R written to avoid 0/0 at the ends.
        impurity = (wl - (left**2).sum(axis=1) / wl) + (wr - (right**2).sum(axis=1) / wr)
        pos = int(np.argmin(impurity))
        if impurity[pos] < best_impurity:
            best_impurity = float(impurity[pos])
            cut = cut_positions[pos]
            best = (f, float((vals[cut] + vals[cut + 1]) / 2.0))
    return best


def _majority_class(targets, weights, num_classes) -> int:
    counts = _weighted_class_counts(targets, weights, num_classes)
    return int(np.argmax(counts))


def fit_greedy(dataset: Dataset, depth: int, rng=None) -> DecisionTree:
    """Top-down recursive Gini splitting to a complete depth-k tree.

    A branch that turns pure or unsplittable before reaching depth k repeats
    its parent's split downward, with every node inheriting the majority
    target.  ``rng`` is accepted for interface parity; fitting is
    deterministic.
    """
    del rng
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if dataset.num_rows == 0:
        raise ValueError("cannot fit a tree on an empty dataset")
    topo = TreeTopology(depth)
    feats = [0] * topo.num_internal
    thresholds = [0.0] * topo.num_internal
    leaf_targets = [0] * topo.num_leaves

    X, y, w = dataset.features, dataset.targets, dataset.weights
    num_classes = dataset.num_classes

    def build(node, idx, parent_split, parent_majority):
        if len(idx) == 0:
            majority = parent_majority
            split = parent_split
        else:
            majority = _majority_class(y[idx], w[idx], num_classes)
            pure = bool((y[idx] == y[idx[0]]).all())
            split = None if pure else best_gini_split(X[idx], y[idx], w[idx], num_classes)
            if split is None:
                split = parent_split
        if topo.is_leaf(node):
            leaf_targets[node - topo.num_internal] = majority
            return
        if split is None:
            # Unsplittable at the root: a degenerate check sending all rows left.
            split = (0, float(X[idx, 0].max()) if len(idx) else 0.0)
        feats[node], thresholds[node] = split
        go_left = X[idx, split[0]] <= split[1]
        left, right = topo.children(node)
        build(left, idx[go_left], split, majority)
        build(right, idx[~go_left], split, majority)

    build(0, np.arange(dataset.num_rows), None, _majority_class(y, w, num_classes))
    return DecisionTree(depth, feats, thresholds, leaf_targets)


def _tree_to_paths(tree: DecisionTree, candidates: CandidateSplits, require_known=True):
    """Convert a fitted tree into id-based paths; drop paths using splits that
    are not in the corresponding node's candidate set (when required)."""
    paths = []
    for leaf, checks, target in tree.leaf_paths():
        nodes = tree.topology.path_nodes(leaf)
        ids = []
        for j, (f, mu) in zip(nodes, checks):
            sid = candidates.id_of(f, mu)
            if sid is None or not candidates.allows(j, sid):
                ids = None
                break
            ids.append(sid)
        if ids is None:
            if require_known:
                raise ValueError("tree uses a split outside the candidate sets")
            continue
        paths.append(Path(leaf=leaf, splits=tuple(ids), target=target))
    return paths


def threshold_sampling(
    dataset: Dataset,
    depth: int,
    rng,
    extra_init: bool = True,
    sample_fits: int = 300,
    extra_fits: int = 100,
):
    """Build per-node candidate splits and the initial column pool.

    Runs ``sample_fits`` greedy fits on 90% subsamples and keeps, per node, the
    q most frequent splits (q = floor(150/|internal|) at the root, floor(100/
    |internal|) elsewhere, frequency ties toward lower feature then threshold).
    One full-data fit contributes both its splits (always added) and its 2^k
    paths; with ``extra_init`` another ``extra_fits`` fits on 80% subsamples
    contribute any path whose splits all lie in the candidate sets.
    """
    topo = TreeTopology(depth)
    n = dataset.num_rows
    tallies: list[Counter] = [Counter() for _ in range(topo.num_internal)]

    size90 = max(1, math.floor(0.9 * n))
    for _ in range(sample_fits):
        sub = dataset.subset(rng.sample(range(n), size90))
        t = fit_greedy(sub, depth)
        for j in topo.internal_nodes:
            tallies[j][(t.features[j], t.thresholds[j])] += 1

    q_root = math.floor(150 / topo.num_internal)
    q_other = math.floor(100 / topo.num_internal)
    chosen: list[set] = []
    for j in topo.internal_nodes:
        q = q_root if j == 0 else q_other
        ranked = sorted(tallies[j].items(), key=lambda kv: (-kv[1], kv[0]))
        chosen.append({pair for pair, _ in ranked[:q]})

    full_tree = fit_greedy(dataset, depth)
    for j in topo.internal_nodes:
        chosen[j].add((full_tree.features[j], full_tree.thresholds[j]))

    universe = sorted(set().union(*chosen))
    splits = tuple(
        SplitCheck(i, feature, threshold) for i, (feature, threshold) in enumerate(universe)
    )
    index = {(s.feature, s.threshold): s.id for s in splits}
    per_node = tuple(
        tuple(sorted(index[pair] for pair in chosen[j])) for j in topo.internal_nodes
    )
    candidates = CandidateSplits(splits=splits, per_node=per_node)

    pool: list[Path] = []
    seen = set()
    for p in _tree_to_paths(full_tree, candidates, require_known=True):
        pool.append(p)
        seen.add(p.key())
    if extra_init:
        size80 = max(1, math.floor(0.8 * n))
        for _ in range(extra_fits):
            sub = dataset.subset(rng.sample(range(n), size80))
            t = fit_greedy(sub, depth)
            for p in _tree_to_paths(t, candidates, require_known=False):
                if p.key() not in seen:
                    seen.add(p.key())
                    pool.append(p)
    return candidates, pool
