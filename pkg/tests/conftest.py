import random

import numpy as np
import pytest

from cgtree.dataset import Dataset
from cgtree.greedy import CandidateSplits
from cgtree.master import BetaCut, DualSolution
from cgtree.tree import SplitCheck, TreeTopology, split_directions


def make_dataset(features, targets, weights=None, num_classes=None):
    features = np.asarray(features, dtype=float)
    targets = np.asarray(targets, dtype=int)
    if num_classes is None:
        num_classes = int(targets.max()) + 1 if len(targets) else 0
    names = [f"c{t}" for t in range(num_classes)]
    return Dataset(features, targets, weights, class_names=names)


def make_candidates(per_node_pairs):
    """Candidate sets from explicit per-node [(feature, threshold), ...] lists."""
    universe = sorted({pair for pairs in per_node_pairs for pair in pairs})
    splits = tuple(SplitCheck(i, f, mu) for i, (f, mu) in enumerate(universe))
    index = {(s.feature, s.threshold): s.id for s in splits}
    per_node = tuple(
        tuple(sorted(index[p] for p in pairs)) for pairs in per_node_pairs
    )
    return CandidateSplits(splits=splits, per_node=per_node)


def random_dataset(rng: random.Random, max_rows=50, max_features=3, max_classes=3,
                   values=(0.0, 1.0, 2.0, 3.0)):
    n = rng.randint(4, max_rows)
    f = rng.randint(1, max_features)
    t = rng.randint(2, max_classes)
    feats = [[rng.choice(values) for _ in range(f)] for _ in range(n)]
    targets = [rng.randrange(t) for _ in range(n)]
    # Keep every class represented so training-style invariants hold.
    for c in range(t):
        targets[c % n] = c
    weights = [rng.randint(1, 3) for _ in range(n)]
    return make_dataset(feats, targets, weights, num_classes=t)


def random_sp_instance(rng: random.Random):
    """Dataset, topology, candidates, synthetic duals and cuts for pricing
    comparisons: |R| <= 50, depth <= 3, |S_j| <= 4, duals in [-2, 2]."""
    depth = rng.randint(1, 3)
    topo = TreeTopology(depth)
    d = random_dataset(rng, max_rows=50, max_features=3, max_classes=3)
    pairs = [
        sorted({
            (rng.randrange(d.num_features), rng.choice([0.5, 1.5, 2.5]))
            for _ in range(rng.randint(1, 4))
        })
        for _ in topo.internal_nodes
    ]
    cand = make_candidates(pairs)
    dirs = split_directions(d, cand.splits)

    alpha = np.array([rng.uniform(-2, 2) for _ in topo.leaves])
    gamma = {}
    for leaf in topo.leaves:
        for j in topo.path_nodes(leaf):
            for sid in cand.node_splits(j):
                if rng.random() < 0.8:
                    gamma[(leaf, j, sid)] = rng.uniform(-2, 2)
    cuts = []
    betas = []
    for _ in range(rng.randint(0, 3)):
        if rng.random() < 0.6 and d.num_rows:
            left = dirs[rng.randrange(d.num_rows)].copy()
            origin = "inspection"
        else:
            left = np.array([rng.random() < 0.5 for _ in cand.splits])
            # Enforce per-feature monotonicity so the pattern is realizable.
            for f in range(d.num_features):
                ids = [s.id for s in cand.splits if s.feature == f]
                ids.sort(key=lambda i: cand.splits[i].threshold)
                seen_left = False
                for i in ids:
                    seen_left = seen_left or left[i]
                    left[i] = seen_left
            origin = "separation"
        cuts.append(BetaCut(sense="=", left_dirs=left, origin=origin, row=-1))
        betas.append(rng.uniform(-2, 2))
    sol = DualSolution(
        objective=0.0,
        alpha=alpha,
        gamma=gamma,
        beta=np.array(betas),
        x=np.zeros(0),
        rho={},
        num_internal=topo.num_internal,
    )
    return d, topo, cand, sol, cuts


@pytest.fixture
def rng():
    return random.Random(20240817)
