"""Pricing: maximum-reduced-cost path search for a leaf.

The merged search optimizes over split assignments and the leaf target in one
pass; the per-target variant fixes the target.  Both are exact: candidate sets
are small by construction, so depth-first enumeration over per-node splits
with reach filtering and an optimistic bound replaces an external MIP/CP
solve.  A cheap randomized heuristic generates most columns; the exact search
runs only when the heuristic comes up empty.

Reduced cost of a path p for leaf l:
    CP(p) - alpha_l - sum_j gamma_{l,j,s(j)} - sum_{cuts covering p} beta_c
Cuts enter through their recorded branch directions; an unlabeled pseudo-row
behaves exactly like a labeled row of weight zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .greedy import CandidateSplits
from .master import BetaCut, DualSolution
from .tree import LEFT, Path, TreeTopology, split_directions


@dataclass
class PricedPath:
    path: Path
    reduced_cost: float


@dataclass
class PricingContext:
    """Precomputed routing tables shared by all pricing calls of a run."""

    dataset: Dataset
    topo: TreeTopology
    candidates: CandidateSplits
    dirs: np.ndarray           # [row, split] True where the row branches left
    class_weights: np.ndarray  # [class, row] row weight where targets match

    @classmethod
    def build(cls, dataset: Dataset, topo: TreeTopology,
              candidates: CandidateSplits) -> "PricingContext":
        dirs = split_directions(dataset, candidates.splits)
        cw = np.zeros((dataset.num_classes, dataset.num_rows))
        cw[dataset.targets, np.arange(dataset.num_rows)] = dataset.weights
        return cls(dataset, topo, candidates, dirs, cw)


def _path_left_flags(path: Path, topo: TreeTopology) -> np.ndarray:
    return np.array([d == LEFT for d in topo.path_directions(path.leaf)])


def reduced_cost(path: Path, sol: DualSolution, cuts: list[BetaCut],
                 topo: TreeTopology) -> float:
    """CP(p) minus the duals of every constraint the column enters."""
    rc = float(path.correct) - sol.alpha_of(path.leaf)
    for j, sid in zip(topo.path_nodes(path.leaf), path.splits):
        rc -= sol.gamma_of(path.leaf, j, sid)
    if cuts:
        sids = np.array(path.splits, dtype=np.int64)
        left = _path_left_flags(path, topo)
        for cut, beta in zip(cuts, sol.beta):
            if cut.covers(sids, left):
                rc -= float(beta)
    return rc


def _search(leaf: int, sol: DualSolution, cuts: list[BetaCut],
            ctx: PricingContext, fixed_target: int | None,
            rc_tol: float, exclude: frozenset) -> PricedPath | None:
    topo = ctx.topo
    nodes = topo.path_nodes(leaf)
    left_dirs = [d == LEFT for d in topo.path_directions(leaf)]
    depth = len(nodes)
    alpha = sol.alpha_of(leaf)

    node_cands = [ctx.candidates.node_splits(j) for j in nodes]
    gammas = [
        np.array([sol.gamma_of(leaf, j, sid) for sid in node_cands[d]])
        for d, j in enumerate(nodes)
    ]
    min_gamma_suffix = np.zeros(depth + 1)
    for d in range(depth - 1, -1, -1):
        min_gamma_suffix[d] = min_gamma_suffix[d + 1] + gammas[d].min()

    n_cuts = len(cuts)
    if n_cuts:
        cut_dirs = np.stack([c.left_dirs for c in cuts])
        betas = np.asarray(sol.beta, dtype=float)
        neg = betas < 0
    else:
        cut_dirs = None
        betas = np.zeros(0)
        neg = np.zeros(0, dtype=bool)

    best_rc = rc_tol
    best: PricedPath | None = None
    sids: list[int] = []

    def evaluate(mask, alive, gamma_acc):
        nonlocal best_rc, best
        class_w = ctx.class_weights @ mask
        penalty = alpha + gamma_acc + (betas[alive].sum() if n_cuts else 0.0)
        targets = (fixed_target,) if fixed_target is not None else range(len(class_w))
        for t in targets:
            rc = float(class_w[t]) - penalty
            if rc > best_rc and (leaf, tuple(sids), t) not in exclude:
                best_rc = rc
                cp = int(round(class_w[t]))
                best = PricedPath(
                    Path(leaf, tuple(sids), int(t), cp), rc
                )

    def bound_ok(mask, alive, gamma_acc, d):
        class_w = ctx.class_weights @ mask
        w_best = (
            class_w[fixed_target] if fixed_target is not None else class_w.max()
        )
        optimistic = w_best - alpha - gamma_acc - min_gamma_suffix[d]
        if n_cuts:
            optimistic -= betas[alive & neg].sum()
        return optimistic > best_rc

    def recurse(d, mask, alive, gamma_acc):
        if d == depth:
            evaluate(mask, alive, gamma_acc)
            return
        is_left = left_dirs[d]
        for pos, sid in enumerate(node_cands[d]):
            new_mask = mask & (ctx.dirs[:, sid] if is_left else ~ctx.dirs[:, sid])
            new_alive = (
                alive & (cut_dirs[:, sid] == is_left) if n_cuts else alive
            )
            new_gamma = gamma_acc + float(gammas[d][pos])
            sids.append(sid)
            if bound_ok(new_mask, new_alive, new_gamma, d + 1):
                recurse(d + 1, new_mask, new_alive, new_gamma)
            sids.pop()

    root_mask = np.ones(ctx.dataset.num_rows, dtype=bool)
    root_alive = np.ones(n_cuts, dtype=bool)
    if bound_ok(root_mask, root_alive, 0.0, 0):
        recurse(0, root_mask, root_alive, 0.0)
    return best


def solve_sp_merged(leaf: int, sol: DualSolution, cuts: list[BetaCut],
                    candidates: CandidateSplits, ctx: PricingContext,
                    rc_tol: float = 1e-6,
                    exclude: frozenset = frozenset()) -> PricedPath | None:
    """Exact maximum over split assignments and targets; None if it does not
    beat ``rc_tol``."""
    del candidates  # carried by ctx; kept for call-site symmetry
    return _search(leaf, sol, cuts, ctx, None, rc_tol, exclude)


def solve_sp_original(leaf: int, target: int, sol: DualSolution,
                      cuts: list[BetaCut], candidates: CandidateSplits,
                      ctx: PricingContext, rc_tol: float = 1e-6,
                      exclude: frozenset = frozenset()) -> PricedPath | None:
    """Exact maximum with the path target fixed."""
    del candidates
    return _search(leaf, sol, cuts, ctx, target, rc_tol, exclude)


def heuristic_pricing(sol: DualSolution, cuts: list[BetaCut],
                      candidates: CandidateSplits, ctx: PricingContext, rng,
                      attempts: int = 100, rc_tol: float = 1e-6,
                      exclude: frozenset = frozenset()) -> list[PricedPath]:
    """Randomized path sampling: a uniform leaf, then per node a uniform split
    not already used on the path (the attempt aborts if a node runs out), with
    the accuracy-maximizing target for the rows reaching the leaf.  Paths with
    reduced cost above ``rc_tol`` are kept, deduplicated, and never duplicate a
    pooled column."""
    topo = ctx.topo
    kept: list[PricedPath] = []
    seen = set(exclude)
    n_cuts = len(cuts)
    if n_cuts:
        cut_dirs = np.stack([c.left_dirs for c in cuts])
        betas = np.asarray(sol.beta, dtype=float)
    for _ in range(attempts):
        leaf = topo.num_internal + rng.randrange(topo.num_leaves)
        nodes = topo.path_nodes(leaf)
        left_dirs = [d == LEFT for d in topo.path_directions(leaf)]
        used: set[int] = set()
        sids: list[int] = []
        for j in nodes:
            avail = [s for s in candidates.node_splits(j) if s not in used]
            if not avail:
                sids = []
                break
            sid = rng.choice(avail)
            used.add(sid)
            sids.append(sid)
        if not sids:
            continue
        mask = np.ones(ctx.dataset.num_rows, dtype=bool)
        alive = np.ones(n_cuts, dtype=bool)
        for sid, is_left in zip(sids, left_dirs):
            mask &= ctx.dirs[:, sid] if is_left else ~ctx.dirs[:, sid]
            if n_cuts:
                alive &= cut_dirs[:, sid] == is_left
        class_w = ctx.class_weights @ mask
        target = int(np.argmax(class_w))
        key = (leaf, tuple(sids), target)
        if key in seen:
            continue
        rc = float(class_w[target]) - sol.alpha_of(leaf)
        for j, sid in zip(nodes, sids):
            rc -= sol.gamma_of(leaf, j, sid)
        if n_cuts:
            rc -= float(betas[alive].sum())
        if rc > rc_tol:
            seen.add(key)
            cp = int(round(class_w[target]))
            kept.append(PricedPath(Path(leaf, tuple(sids), target, cp), rc))
    return kept
