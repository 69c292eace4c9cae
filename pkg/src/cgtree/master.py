"""Restricted master problem over path columns.

The LP maximizes the weighted count of correct predictions subject to
  * one selected path per leaf (leaf-convexity rows),
  * split-consistency rows tying per-leaf path flow to shared split-selection
    variables, created lazily for every (leaf, node, split) triple the moment
    any column uses the (node, split) pair,
  * managed row constraints ("beta cuts"): each labeled or unlabeled row must
    follow exactly/at most/at least one selected path.

The final integer solve is an exact depth-first branch-and-bound on the split
selection variables over the pooled columns.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .greedy import CandidateSplits
from .simplex import BoundedSimplex, InfeasibleError
from .tree import LEFT, DecisionTree, Path, TreeTopology, split_directions

MODES = ("none", "lb", "ub", "eq", "all", "extra")

_MODE_SENSE = {"lb": ">=", "ub": "<=", "eq": "=", "all": "=", "extra": "="}


class MasterError(RuntimeError):
    pass


class MasterInfeasible(MasterError):
    """The LP has no feasible point (expected only under branching fixes)."""


@dataclass
class BetaCut:
    """A row constraint handled as a cutting plane.

    ``left_dirs[s]`` records whether the (possibly unlabeled) row branches left
    on split ``s``; a path is covered iff every split along it is taken in the
    path's own direction.  The predicate is total over current and future
    columns because the split universe is fixed.
    """

    sense: str                  # '<=', '>=', '='
    left_dirs: np.ndarray       # bool per split id
    origin: str                 # 'initial' | 'inspection' | 'separation'
    row: int                    # LP row index
    source_row: int | None = None

    def covers(self, split_ids: np.ndarray, path_left: np.ndarray) -> bool:
        return bool(np.all(self.left_dirs[split_ids] == path_left))


@dataclass
class DualSolution:
    objective: float
    alpha: np.ndarray                    # per leaf, in leaf order
    gamma: dict                          # (leaf, node, split) -> dual
    beta: np.ndarray                     # per active cut, in cut order
    x: np.ndarray                        # per pooled column
    rho: dict                            # (node, split) -> primal value
    num_internal: int

    def alpha_of(self, leaf: int) -> float:
        return float(self.alpha[leaf - self.num_internal])

    def gamma_of(self, leaf: int, node: int, split_id: int) -> float:
        return self.gamma.get((leaf, node, split_id), 0.0)

    def positive_columns(self, tol: float = 1e-9):
        idx = np.nonzero(self.x > tol)[0]
        return [(int(i), float(self.x[i])) for i in idx]


@dataclass
class IntegerResult:
    tree: DecisionTree
    objective: int
    selected: list[Path]
    bound: float
    proved: bool
    nodes_explored: int


class RestrictedMaster:
    def __init__(self, topo: TreeTopology, candidates: CandidateSplits,
                 dataset: Dataset, mode: str = "ub", lp_tol: float = 1e-6):
        if mode not in MODES:
            raise MasterError(f"unknown beta mode {mode!r}")
        self.topo = topo
        self.candidates = candidates
        self.dataset = dataset
        self.mode = mode
        self.lp_tol = lp_tol

        self.lp = BoundedSimplex()
        self.alpha_rows = {
            leaf: self.lp.add_row([], "=", 1.0) for leaf in topo.leaves
        }
        self.gamma_rows: dict[tuple, int] = {}
        self.rho_vars: dict[tuple, int] = {}

        self.columns: list[Path] = []
        self.column_vars: list[int] = []
        self.column_masks: list[np.ndarray] = []
        self.column_splits: list[np.ndarray] = []
        self.column_left: list[np.ndarray] = []
        self._keys: set = set()

        self.cuts: list[BetaCut] = []
        self._cut_keys: set = set()

        self.dirs = split_directions(dataset, candidates.splits)
        self.class_weights = np.zeros((dataset.num_classes, dataset.num_rows))
        self.class_weights[dataset.targets, np.arange(dataset.num_rows)] = (
            dataset.weights
        )

        self.lp_values: list[float] = []
        self.solves = 0
        if mode == "all":
            self._install_all_row_cuts()

    # ------------------------------------------------------------------
    # Columns
    # ------------------------------------------------------------------
    def _path_arrays(self, path: Path):
        nodes = self.topo.path_nodes(path.leaf)
        dirs = self.topo.path_directions(path.leaf)
        for j, sid in zip(nodes, path.splits):
            if not self.candidates.allows(j, sid):
                raise MasterError(
                    f"split {sid} is not a candidate at node {j}"
                )
        sids = np.array(path.splits, dtype=np.int64)
        left = np.array([d == LEFT for d in dirs])
        return nodes, sids, left

    def reach_mask(self, split_ids: np.ndarray, path_left: np.ndarray) -> np.ndarray:
        mask = np.ones(self.dataset.num_rows, dtype=bool)
        for sid, left in zip(split_ids, path_left):
            mask &= self.dirs[:, sid] if left else ~self.dirs[:, sid]
        return mask

    def correct_predictions(self, target: int, mask: np.ndarray) -> int:
        return int(round(self.class_weights[target, mask].sum()))

    def add_column(self, path: Path):
        """Pool a path; returns its column id, or None for a duplicate."""
        key = path.key()
        if key in self._keys:
            return None
        nodes, sids, left = self._path_arrays(path)
        mask = self.reach_mask(sids, left)
        cp = self.correct_predictions(path.target, mask)

        entries = [(self.alpha_rows[path.leaf], 1.0)]
        for j, sid in zip(nodes, path.splits):
            self._ensure_gamma_rows(j, sid)
            entries.append((self.gamma_rows[(path.leaf, j, sid)], 1.0))
        for cut in self.cuts:
            if cut.covers(sids, left):
                entries.append((cut.row, 1.0))
        var = self.lp.add_variable(obj=float(cp), entries=entries)

        col_id = len(self.columns)
        self.columns.append(Path(path.leaf, path.splits, path.target, cp, col_id))
        self.column_vars.append(var)
        self.column_masks.append(mask)
        self.column_splits.append(sids)
        self.column_left.append(left)
        self._keys.add(key)
        return col_id

    def has_column(self, key) -> bool:
        return key in self._keys

    @property
    def pool_keys(self):
        return self._keys

    def _ensure_gamma_rows(self, node: int, split_id: int) -> None:
        if (node, split_id) in self.rho_vars:
            return
        rho = self.lp.add_variable(obj=0.0)
        self.rho_vars[(node, split_id)] = rho
        for leaf in self.topo.leaves_below(node):
            row = self.lp.add_row([(rho, -1.0)], "=", 0.0)
            self.gamma_rows[(leaf, node, split_id)] = row

    # ------------------------------------------------------------------
    # Cuts
    # ------------------------------------------------------------------
    def add_cut(self, left_dirs: np.ndarray, sense: str, origin: str,
                source_row: int | None = None):
        """Install a row constraint; returns the BetaCut, or None if one with
        the same branch behaviour already exists."""
        key = left_dirs.tobytes()
        if key in self._cut_keys:
            return None
        entries = []
        for col_id, var in enumerate(self.column_vars):
            if bool(np.all(left_dirs[self.column_splits[col_id]]
                           == self.column_left[col_id])):
                entries.append((var, 1.0))
        row = self.lp.add_row(entries, sense, 1.0)
        cut = BetaCut(sense=sense, left_dirs=left_dirs.copy(), origin=origin,
                      row=row, source_row=source_row)
        self.cuts.append(cut)
        self._cut_keys.add(key)
        return cut

    def _install_all_row_cuts(self) -> None:
        sense = _MODE_SENSE["all"]
        for r in range(self.dataset.num_rows):
            self.add_cut(self.dirs[r], sense, "initial", source_row=r)

    def violated_row_cuts(self, sol: DualSolution, rows: Dataset | None = None,
                          tol: float = 1e-6):
        """Labeled rows whose coverage by the fractional solution breaks the
        mode's bound; returns (left_dirs, sense, source_row) proposals."""
        if self.mode == "none":
            return []
        if rows is not None and rows is not self.dataset:
            raise MasterError("row inspection runs on the master's dataset")
        sense = _MODE_SENSE[self.mode]
        coverage = np.zeros(self.dataset.num_rows)
        for col_id, value in sol.positive_columns():
            coverage += value * self.column_masks[col_id]
        out = []
        emitted = set()
        for r in range(self.dataset.num_rows):
            key = self.dirs[r].tobytes()
            if key in self._cut_keys or key in emitted:
                continue
            L = coverage[r]
            violated = (
                (self.mode == "ub" and L > 1 + tol)
                or (self.mode == "lb" and L < 1 - tol)
                or (self.mode in ("eq", "all", "extra") and abs(L - 1) > tol)
            )
            if violated:
                emitted.add(key)
                out.append((self.dirs[r].copy(), sense, r))
        return out

    # ------------------------------------------------------------------
    # LP solve
    # ------------------------------------------------------------------
    def solve_lp(self, exact: bool = False) -> DualSolution:
        """Solve the restricted LP and return primal values with the duals.

        ``exact`` forces the true (unperturbed) bounds; plain solves may run
        with the solver's anti-degeneracy bound spread, whose duals are
        equally valid for pricing.
        """
        if not self.columns:
            raise MasterError("master has no columns")
        per_leaf = {leaf: 0 for leaf in self.topo.leaves}
        for p in self.columns:
            per_leaf[p.leaf] += 1
        missing = [leaf for leaf, n in per_leaf.items() if n == 0]
        if missing:
            raise MasterError(f"no column for leaves {missing}")
        try:
            sol = self.lp.solve(exact=exact)
        except InfeasibleError as exc:
            raise MasterInfeasible(f"master LP infeasible: {exc}") from exc
        report = sol.report
        scale = max(1.0, abs(sol.objective))
        if (report["primal_residual"] > self.lp_tol
                or report["bound_violation"] > self.lp_tol
                or report["dual_violation"] > self.lp_tol
                or report["duality_gap"] > self.lp_tol * scale):
            raise MasterError(f"LP verification failed: {report}")
        self.solves += 1
        self.lp_values.append(sol.objective)

        alpha = np.array([sol.duals[self.alpha_rows[leaf]] for leaf in self.topo.leaves])
        gamma = {
            key: float(sol.duals[row]) for key, row in self.gamma_rows.items()
        }
        beta = np.array([sol.duals[cut.row] for cut in self.cuts])
        x = np.array([sol.x[v] for v in self.column_vars])
        rho = {
            key: float(sol.x[v]) for key, v in self.rho_vars.items()
        }
        return DualSolution(
            objective=float(sol.objective),
            alpha=alpha,
            gamma=gamma,
            beta=beta,
            x=x,
            rho=rho,
            num_internal=self.topo.num_internal,
        )

    def dump_lp(self, path) -> None:
        names = {}
        for col_id, var in enumerate(self.column_vars):
            names[var] = f"x_{col_id}"
        for (node, split_id), var in self.rho_vars.items():
            names[var] = f"rho_{node}_{split_id}"
        rows = {row: f"alpha_{leaf}" for leaf, row in self.alpha_rows.items()}
        for (leaf, node, sid), row in self.gamma_rows.items():
            rows[row] = f"gamma_{leaf}_{node}_{sid}"
        for i, cut in enumerate(self.cuts):
            rows[cut.row] = f"beta_{i}"
        with open(path, "w") as fh:
            fh.write(self.lp.dump_lp_text(var_names=names, row_names=rows))

    # ------------------------------------------------------------------
    # Integer solve
    # ------------------------------------------------------------------
    def solve_integer(self, budget: float = 0.0,
                      incumbent_cols: list[int] | None = None) -> IntegerResult:
        """Exact optimum of the pooled integer program by branch-and-bound on
        the split-selection variables (fix to 1 first, then to 0, depth
        first).  A nonzero ``budget`` caps the wall time; on exhaustion the
        best incumbent is returned with ``proved=False``."""
        deadline = time.monotonic() + budget if budget > 0 else None
        saved_bounds = {
            key: (self.lp.lb[v], self.lp.ub[v]) for key, v in self.rho_vars.items()
        }
        best: dict = {"value": -1, "cols": None, "assign": None}
        stats = {"nodes": 0, "proved": True}

        if incumbent_cols:
            value, assign = self._score_selection(incumbent_cols)
            best.update(value=value, cols=list(incumbent_cols), assign=assign)

        root = self.solve_lp()
        root_bound = root.objective
        self._incumbent_from_rho(root, best)

        def out_of_time():
            return deadline is not None and time.monotonic() > deadline

        def recurse(sol: DualSolution):
            stats["nodes"] += 1
            if sol.objective < best["value"] + 1 - 1e-6:
                return
            frac_key = self._most_fractional(sol)
            if frac_key is None:
                self._incumbent_from_rho(sol, best, exact=True)
                return
            if out_of_time():
                stats["proved"] = False
                return
            var = self.rho_vars[frac_key]
            for fixed in (1.0, 0.0):
                lb0, ub0 = self.lp.lb[var], self.lp.ub[var]
                self.lp.set_bounds(var, fixed, fixed)
                try:
                    child = self.solve_lp()
                except MasterInfeasible:
                    child = None
                if child is not None:
                    recurse(child)
                self.lp.set_bounds(var, lb0, ub0)
                if out_of_time():
                    stats["proved"] = False
                    return

        try:
            recurse(root)
        finally:
            for key, (lb0, ub0) in saved_bounds.items():
                self.lp.set_bounds(self.rho_vars[key], lb0, ub0)

        if best["cols"] is None:
            raise MasterError("no integer-feasible selection found")
        selected = [self.columns[c] for c in sorted(best["cols"])]
        tree = self._selection_to_tree(selected)
        return IntegerResult(
            tree=tree,
            objective=int(best["value"]),
            selected=selected,
            bound=root_bound,
            proved=stats["proved"],
            nodes_explored=stats["nodes"],
        )

    def _most_fractional(self, sol: DualSolution):
        best_key = None
        best_frac = 1e-6
        for key in sorted(self.rho_vars):
            v = sol.rho[key]
            frac = min(v - math.floor(v), math.ceil(v) - v)
            if frac > best_frac + 1e-12:
                best_frac = frac
                best_key = key
        return best_key

    def _incumbent_from_rho(self, sol: DualSolution, best: dict,
                            exact: bool = False) -> None:
        """Selection induced by the per-node argmax of the split variables:
        each leaf takes its best-scoring pooled column matching those splits.
        With an integral split solution this recovers the node's exact
        optimum; as a rounding it may fail (some leaf unmatched) and is then
        skipped."""
        by_node: dict[int, tuple[int, float]] = {}
        for (node, sid), value in sorted(sol.rho.items()):
            cur = by_node.get(node)
            if cur is None or value > cur[1] + 1e-12:
                by_node[node] = (sid, value)
        cols = []
        for leaf in self.topo.leaves:
            nodes = self.topo.path_nodes(leaf)
            if any(j not in by_node for j in nodes):
                return
            want = tuple(by_node[j][0] for j in nodes)
            match = [
                c for c, p in enumerate(self.columns)
                if p.leaf == leaf and p.splits == want
            ]
            if not match:
                if exact:
                    raise MasterError("integral LP node lost its own columns")
                return
            match.sort(key=lambda c: (-self.columns[c].correct,
                                      self.columns[c].target, c))
            cols.append(match[0])
        value, assign = self._score_selection(cols)
        if exact and abs(value - sol.objective) > 0.5:
            raise MasterError(
                f"integral node value {sol.objective} != selection value {value}"
            )
        if value > best["value"] or (
            value == best["value"] and best["assign"] is not None
            and assign < best["assign"]
        ):
            best.update(value=value, cols=cols, assign=assign)

    def _score_selection(self, cols: list[int]):
        assign_map: dict[int, int] = {}
        value = 0
        leaves = set()
        for c in cols:
            p = self.columns[c]
            if p.leaf in leaves:
                raise MasterError("two columns selected for one leaf")
            leaves.add(p.leaf)
            value += p.correct
            for j, sid in zip(self.topo.path_nodes(p.leaf), p.splits):
                if assign_map.setdefault(j, sid) != sid:
                    raise MasterError("inconsistent split selection")
        assign = tuple(sorted(assign_map.items()))
        return value, assign

    def _selection_to_tree(self, selected: list[Path]) -> DecisionTree:
        features = [0] * self.topo.num_internal
        thresholds = [0.0] * self.topo.num_internal
        targets = [0] * self.topo.num_leaves
        assigned: dict[int, int] = {}
        for p in selected:
            for j, sid in zip(self.topo.path_nodes(p.leaf), p.splits):
                prev = assigned.setdefault(j, sid)
                if prev != sid:
                    raise MasterError(
                        f"selected paths disagree at node {j}: {prev} vs {sid}"
                    )
            targets[p.leaf - self.topo.num_internal] = p.target
        for j, sid in assigned.items():
            s = self.candidates.split(sid)
            features[j], thresholds[j] = s.feature, s.threshold
        return DecisionTree(self.topo.depth, features, thresholds, targets)
