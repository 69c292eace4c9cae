"""Training pipeline: threshold sampling, optional row merging, the column
generation / cutting plane loop, and the final integer solve.

Per iteration the loop solves the restricted LP, runs a cut round on schedule
(and re-solves when cuts land), then prices: the randomized heuristic first
and, when it returns nothing, the exact per-leaf searches.  The run stops when
exact pricing finds no column and no row constraint is violated -- at that
point the LP value is a valid bound for the fixed candidate sets -- or when
the time budget forces a stop.  The last pool is then solved as an integer
program.
"""

from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass, field

from .dataset import DataError, Dataset
from .greedy import fit_greedy, threshold_sampling
from .master import MODES, RestrictedMaster
from .preprocess import merge_duplicate_rows
from .pricing import (
    PricingContext,
    heuristic_pricing,
    solve_sp_merged,
    solve_sp_original,
)
from .separation import generate_unlabeled_cuts, pattern_directions
from .tree import DecisionTree, TreeTopology, accuracy

log = logging.getLogger("cgtree.trainer")

SP_MODES = ("merged", "original")


@dataclass
class TrainConfig:
    depth: int
    time_limit: float = 0.0          # seconds; 0 disables the limit
    beta_mode: str = "ub"
    sp_mode: str = "merged"
    extra_init: bool = True
    preprocess: bool = False
    seed: int = 1
    heuristic_attempts: int = 100
    cut_period: int = 10
    rc_tol: float = 1e-6
    lp_tol: float = 1e-6
    separation_cap: int = 50

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.beta_mode not in MODES:
            raise ValueError(f"beta_mode must be one of {MODES}")
        if self.sp_mode not in SP_MODES:
            raise ValueError(f"sp_mode must be one of {SP_MODES}")
        if self.cut_period < 1:
            raise ValueError("cut_period must be >= 1")
        if self.rc_tol <= 0 or self.lp_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.time_limit < 0:
            raise ValueError("time_limit must be >= 0 (0 = none)")


@dataclass
class TrainStats:
    iterations: int = 0
    lp_solves: int = 0
    columns_heuristic: int = 0
    columns_exact: int = 0
    cuts_labeled: int = 0
    cuts_pseudo: int = 0
    pool_size: int = 0
    bb_nodes: int = 0
    cart_accuracy: float = 0.0
    cg_converged: bool = False
    mip_proved: bool = False
    total_weight: int = 0
    merged_rows: int = 0
    times: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {k: (dict(v) if isinstance(v, dict) else v)
                for k, v in self.__dict__.items()}


@dataclass
class TrainedModel:
    tree: DecisionTree
    train_accuracy: float
    lp_bound: float
    integer_value: int
    optimal: bool
    stats: TrainStats
    class_names: list[str]
    selected_paths: list = field(default_factory=list)


def _phase_seed(seed: int, phase: int) -> int:
    return seed * 1_000_003 + phase


class _Timer:
    def __init__(self, times: dict, key: str):
        self.times = times
        self.key = key

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.times[self.key] = self.times.get(self.key, 0.0) + (
            time.perf_counter() - self.start
        )


def train(cfg: TrainConfig, dataset: Dataset) -> TrainedModel:
    if len(dataset.classes_present()) < 2:
        raise DataError("training requires at least two classes present")
    start = time.monotonic()
    cg_deadline = (
        start + 0.9 * cfg.time_limit if cfg.time_limit > 0 else math.inf
    )
    topo = TreeTopology(cfg.depth)
    stats = TrainStats()
    times = stats.times

    with _Timer(times, "sampling"):
        sampling_rng = random.Random(_phase_seed(cfg.seed, 1))
        candidates, initial_paths = threshold_sampling(
            dataset, cfg.depth, sampling_rng, extra_init=cfg.extra_init
        )
        cart_tree = fit_greedy(dataset, cfg.depth)
        stats.cart_accuracy = accuracy(cart_tree, dataset)

    with _Timer(times, "preprocess"):
        master_data = (
            merge_duplicate_rows(dataset, candidates, topo)
            if cfg.preprocess
            else dataset
        )
        stats.merged_rows = dataset.num_rows - master_data.num_rows
    stats.total_weight = master_data.total_weight

    master = RestrictedMaster(topo, candidates, master_data,
                              mode=cfg.beta_mode, lp_tol=cfg.lp_tol)
    if cfg.beta_mode == "all":
        stats.cuts_labeled = len(master.cuts)
    cart_cols = []
    for i, path in enumerate(initial_paths):
        col = master.add_column(path)
        if col is not None and i < topo.num_leaves:
            cart_cols.append(col)
    ctx = PricingContext(master_data, topo, candidates,
                         master.dirs, master.class_weights)
    heur_rng = random.Random(_phase_seed(cfg.seed, 2))

    def cut_round(sol) -> int:
        added = 0
        with _Timer(times, "cuts"):
            for dirs, sense, src in master.violated_row_cuts(sol, tol=cfg.lp_tol):
                if master.add_cut(dirs, sense, "inspection", src) is not None:
                    added += 1
                    stats.cuts_labeled += 1
            if cfg.beta_mode == "extra":
                positive = [
                    (master.columns[c], v) for c, v in sol.positive_columns()
                ]
                for pattern, _value in generate_unlabeled_cuts(
                    positive, candidates.splits, topo,
                    tol=cfg.lp_tol, cap=cfg.separation_cap,
                ):
                    dirs = pattern_directions(pattern, candidates.splits)
                    if master.add_cut(dirs, "=", "separation") is not None:
                        added += 1
                        stats.cuts_pseudo += 1
        return added

    def exact_pricing(sol):
        found = []
        with _Timer(times, "pricing_exact"):
            exclude = frozenset(master.pool_keys)
            for leaf in topo.leaves:
                if cfg.sp_mode == "merged":
                    priced = solve_sp_merged(leaf, sol, master.cuts, candidates,
                                             ctx, cfg.rc_tol, exclude)
                    if priced is not None:
                        found.append(priced)
                else:
                    for target in range(master_data.num_classes):
                        priced = solve_sp_original(leaf, target, sol,
                                                   master.cuts, candidates,
                                                   ctx, cfg.rc_tol, exclude)
                        if priced is not None:
                            found.append(priced)
        return found

    converged = False
    sol = None
    while True:
        stats.iterations += 1
        with _Timer(times, "lp"):
            sol = master.solve_lp()
        if time.monotonic() > cg_deadline:
            log.info("iter=%d lp=%.6f stop=time_limit elapsed=%.2f",
                     stats.iterations, sol.objective, time.monotonic() - start)
            break
        cuts_added = 0
        if stats.iterations % cfg.cut_period == 0:
            cuts_added = cut_round(sol)
            if cuts_added:
                with _Timer(times, "lp"):
                    sol = master.solve_lp()
        new_cols = 0
        with _Timer(times, "pricing_heuristic"):
            priced = heuristic_pricing(
                sol, master.cuts, candidates, ctx, heur_rng,
                attempts=cfg.heuristic_attempts, rc_tol=cfg.rc_tol,
                exclude=frozenset(master.pool_keys),
            ) if cfg.heuristic_attempts > 0 else []
        for p in priced:
            if master.add_column(p.path) is not None:
                new_cols += 1
                stats.columns_heuristic += 1
        if new_cols == 0:
            exact = exact_pricing(sol)
            for p in exact:
                if master.add_column(p.path) is not None:
                    new_cols += 1
                    stats.columns_exact += 1
            if new_cols == 0 and master.lp.perturbed:
                # Pricing came back clean against perturbed-solve duals;
                # confirm against an exact solve before trusting it.
                with _Timer(times, "lp"):
                    sol = master.solve_lp(exact=True)
                for p in exact_pricing(sol):
                    if master.add_column(p.path) is not None:
                        new_cols += 1
                        stats.columns_exact += 1
            if new_cols == 0:
                # Pricing is clean; stop only if no constraint is violated.
                if cut_round(sol) == 0:
                    converged = True
                    log.info(
                        "iter=%d lp=%.6f stop=converged elapsed=%.2f",
                        stats.iterations, sol.objective,
                        time.monotonic() - start,
                    )
                    break
        log.info(
            "iter=%d lp=%.6f cols=%d cuts=%d pool=%d elapsed=%.2f",
            stats.iterations, sol.objective, new_cols,
            cuts_added, len(master.columns), time.monotonic() - start,
        )

    stats.cg_converged = converged
    stats.pool_size = len(master.columns)
    stats.lp_solves = master.solves
    lp_bound = sol.objective

    if cfg.time_limit > 0:
        elapsed = time.monotonic() - start
        mip_budget = max(cfg.time_limit - elapsed, 0.1 * cfg.time_limit)
    else:
        mip_budget = 0.0
    with _Timer(times, "integer"):
        result = master.solve_integer(budget=mip_budget,
                                      incumbent_cols=cart_cols)
    stats.bb_nodes = result.nodes_explored
    stats.mip_proved = result.proved
    stats.lp_solves = master.solves

    optimal = (
        converged
        and result.proved
        and lp_bound - result.objective <= cfg.lp_tol * max(1.0, abs(lp_bound))
    )
    train_acc = result.objective / master_data.total_weight
    log.info(
        "done lp_bound=%.6f integer=%d optimal=%s accuracy=%.4f cart=%.4f",
        lp_bound, result.objective, optimal, train_acc, stats.cart_accuracy,
    )
    return TrainedModel(
        tree=result.tree,
        train_accuracy=train_acc,
        lp_bound=lp_bound,
        integer_value=result.objective,
        optimal=optimal,
        stats=stats,
        class_names=list(dataset.class_names),
        selected_paths=result.selected,
    )
