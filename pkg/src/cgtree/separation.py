"""Generation of unlabeled-row cuts.

A branch pattern fixes, for every split in the universe, which branch an
(unlabeled) row would take.  Per-feature monotonicity -- going left on a low
threshold forces going left on every higher one -- makes a pattern equivalent
to choosing one gap per feature among the sorted distinct thresholds, so the
search enumerates gap choices and inconsistent patterns never arise.

The search maximizes the total fractional value of the positive-value paths a
pattern would follow and returns every improving pattern it completes
(value > 1 + tol), the optimum included, capped to bound cut-pool growth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tree import LEFT, Path, TreeTopology


@dataclass(frozen=True)
class BranchPattern:
    """One gap index per feature: gap g on a feature with sorted thresholds
    t_0 < ... < t_{m-1} places the row in (t_{g-1}, t_g], so the first g
    splits are taken right and the rest left."""

    gaps: tuple[tuple[int, int], ...]   # sorted (feature, gap) pairs

    def gap_of(self, feature: int) -> int:
        for f, g in self.gaps:
            if f == feature:
                return g
        return 0


def feature_thresholds(splits) -> dict[int, list[float]]:
    by_feature: dict[int, set[float]] = {}
    for s in splits:
        by_feature.setdefault(s.feature, set()).add(s.threshold)
    return {f: sorted(ts) for f, ts in by_feature.items()}


def pattern_directions(pattern: BranchPattern, splits) -> np.ndarray:
    """Left/right flag per split id implied by the pattern (True = left)."""
    thresholds = feature_thresholds(splits)
    rank = {
        (f, t): i for f, ts in thresholds.items() for i, t in enumerate(ts)
    }
    out = np.empty(len(splits), dtype=bool)
    for s in splits:
        g = pattern.gap_of(s.feature)
        if not 0 <= g <= len(thresholds[s.feature]):
            raise ValueError(f"gap {g} out of range for feature {s.feature}")
        out[s.id] = rank[(s.feature, s.threshold)] >= g
    return out


def pattern_to_row(pattern: BranchPattern, splits):
    """Feature-value bounds implied by a pattern, with a representative value
    per feature for diagnostics (midpoint; +-1 beyond extreme thresholds)."""
    thresholds = feature_thresholds(splits)
    bounds = {}
    for feature, gap in pattern.gaps:
        ts = thresholds.get(feature, [])
        if not 0 <= gap <= len(ts):
            raise ValueError(
                f"inconsistent pattern: gap {gap} for feature {feature} "
                f"with {len(ts)} thresholds"
            )
        lo = ts[gap - 1] if gap >= 1 else -np.inf
        hi = ts[gap] if gap < len(ts) else np.inf
        if np.isinf(lo) and np.isinf(hi):
            rep = 0.0
        elif np.isinf(lo):
            rep = hi - 1.0
        elif np.isinf(hi):
            rep = lo + 1.0
        else:
            rep = (lo + hi) / 2.0
        bounds[feature] = (lo, hi, rep)
    return bounds


def _path_gap_windows(path: Path, splits, topo: TreeTopology, thresholds):
    """Per-feature window of gap choices under which the path is followed;
    None when the path's own split directions conflict."""
    rank = {
        (f, t): i for f, ts in thresholds.items() for i, t in enumerate(ts)
    }
    windows: dict[int, list[int]] = {}
    dirs = topo.path_directions(path.leaf)
    for sid, d in zip(path.splits, dirs):
        s = splits[sid]
        i = rank[(s.feature, s.threshold)]
        lo, hi = windows.setdefault(s.feature, [0, len(thresholds[s.feature])])
        if d == LEFT:
            hi = min(hi, i)       # gap <= rank: row value <= threshold
        else:
            lo = max(lo, i + 1)   # gap > rank: row value above threshold
        if lo > hi:
            return None
        windows[s.feature] = [lo, hi]
    return {f: (lo, hi) for f, (lo, hi) in windows.items()}


def generate_unlabeled_cuts(paths_with_values, splits, topo: TreeTopology,
                            tol: float = 1e-6, cap: int = 50):
    """Exact search for branch patterns with fractional coverage above one.

    ``paths_with_values`` pairs each positive-value path with its LP value.
    Returns [(BranchPattern, coverage)] sorted by coverage (optimum first),
    every entry strictly above 1 + tol; empty when the optimum is not.
    """
    thresholds = feature_thresholds(splits)
    alive_paths = []
    for path, value in paths_with_values:
        if value <= 0:
            continue
        windows = _path_gap_windows(path, splits, topo, thresholds)
        if windows is not None:
            alive_paths.append((windows, float(value)))
    if not alive_paths:
        return []

    involvement: dict[int, int] = {}
    for windows, _ in alive_paths:
        for f in windows:
            involvement[f] = involvement.get(f, 0) + 1
    order = sorted(involvement, key=lambda f: (-involvement[f], f))

    found: dict[tuple, float] = {}
    threshold_value = 1.0 + tol

    def prune_level():
        if len(found) < cap:
            return threshold_value
        return max(threshold_value, sorted(found.values(), reverse=True)[cap - 1])

    assigned: list[tuple[int, int]] = []

    def recurse(pos, alive, total):
        if total <= prune_level():
            return
        if pos == len(order):
            pattern_key = tuple(assigned)
            if pattern_key not in found:
                found[pattern_key] = total
                if len(found) > 4 * cap:
                    keep = sorted(found.items(), key=lambda kv: -kv[1])[: 2 * cap]
                    found.clear()
                    found.update(keep)
            return
        f = order[pos]
        for gap in range(len(thresholds[f]) + 1):
            new_alive = []
            new_total = 0.0
            for windows, value in alive:
                lo, hi = windows.get(f, (0, len(thresholds[f])))
                if lo <= gap <= hi:
                    new_alive.append((windows, value))
                    new_total += value
            assigned.append((f, gap))
            recurse(pos + 1, new_alive, new_total)
            assigned.pop()

    recurse(0, alive_paths, sum(v for _, v in alive_paths))

    default_gaps = tuple(
        (f, 0) for f in sorted(thresholds) if f not in involvement
    )
    results = []
    for key, value in found.items():
        gaps = tuple(sorted(key + default_gaps))
        results.append((BranchPattern(gaps=gaps), value))
    results.sort(key=lambda pv: (-pv[1], pv[0].gaps))
    return results[:cap]
