"""Brute-force reference implementations for tests.

These deliberately share nothing with the production solvers beyond the row
routing primitives: pricing and separation optima are recomputed by plain
enumeration, and the end-to-end optimum by trying every split assignment.
Size guards fail loudly; the oracles are correctness anchors, never fallbacks.
"""

from __future__ import annotations

import itertools
import math

from .dataset import Dataset
from .greedy import CandidateSplits
from .separation import BranchPattern, feature_thresholds, pattern_directions
from .tree import LEFT, Path, TreeTopology, row_branch


class OracleSizeError(RuntimeError):
    pass


def _assignments(candidates: CandidateSplits, nodes, limit):
    space = 1
    for j in nodes:
        space *= len(candidates.node_splits(j))
    if space > limit:
        raise OracleSizeError(f"{space} assignments exceed the {limit} guard")
    return itertools.product(*(candidates.node_splits(j) for j in nodes))


def _route_reaches(row, leaf, sids, candidates, topo):
    dirs = topo.path_directions(leaf)
    for sid, d in zip(sids, dirs):
        if row_branch(row, candidates.split(sid)) != d:
            return False
    return True


def brute_force_sp(leaf, target, sol, cuts, candidates: CandidateSplits,
                   dataset: Dataset, topo: TreeTopology, limit: int = 10**4):
    """Best reduced cost over every split assignment (and every target when
    ``target`` is None); returns (reduced_cost, Path)."""
    nodes = topo.path_nodes(leaf)
    dirs = topo.path_directions(leaf)
    best_rc = -math.inf
    best_path = None
    targets = range(dataset.num_classes) if target is None else (target,)
    for sids in _assignments(candidates, nodes, limit):
        reached = [r for r in dataset.rows
                   if _route_reaches(r, leaf, sids, candidates, topo)]
        penalty = sol.alpha_of(leaf)
        for j, sid in zip(nodes, sids):
            penalty += sol.gamma_of(leaf, j, sid)
        for cut, beta in zip(cuts, sol.beta):
            covered = all(
                cut.left_dirs[sid] == (d == LEFT) for sid, d in zip(sids, dirs)
            )
            if covered:
                penalty += float(beta)
        for t in targets:
            correct = sum(r.weight for r in reached if r.target == t)
            rc = correct - penalty
            if rc > best_rc + 1e-12:
                best_rc = rc
                best_path = Path(leaf, tuple(sids), t, correct)
    return best_rc, best_path


def brute_force_separation(paths_with_values, splits, topo: TreeTopology,
                           limit: int = 10**5) -> float:
    """Maximum fractional coverage over every consistent branch pattern."""
    thresholds = feature_thresholds(splits)
    features = sorted(thresholds)
    space = 1
    for f in features:
        space *= len(thresholds[f]) + 1
    if space > limit:
        raise OracleSizeError(f"{space} patterns exceed the {limit} guard")
    best = 0.0
    for gaps in itertools.product(*(range(len(thresholds[f]) + 1) for f in features)):
        pattern = BranchPattern(gaps=tuple(zip(features, gaps)))
        dirs = pattern_directions(pattern, splits)
        total = 0.0
        for path, value in paths_with_values:
            if value <= 0:
                continue
            path_dirs = topo.path_directions(path.leaf)
            if all(dirs[sid] == (d == LEFT)
                   for sid, d in zip(path.splits, path_dirs)):
                total += value
        best = max(best, total)
    return best


def brute_force_tree_optimum(dataset: Dataset, candidates: CandidateSplits,
                             depth: int, limit: int = 10**5) -> int:
    """Best achievable weighted-correct count over every candidate-split tree
    with per-leaf majority targets."""
    topo = TreeTopology(depth)
    best = -1
    for assignment in _assignments(candidates, list(topo.internal_nodes), limit):
        per_leaf_counts: dict[int, dict[int, int]] = {}
        for row in dataset.rows:
            j = 0
            while not topo.is_leaf(j):
                sid = assignment[j]
                left, right = topo.children(j)
                j = left if row_branch(row, candidates.split(sid)) == LEFT else right
            counts = per_leaf_counts.setdefault(j, {})
            counts[row.target] = counts.get(row.target, 0) + row.weight
        total = sum(max(counts.values()) for counts in per_leaf_counts.values())
        best = max(best, total)
    return best
