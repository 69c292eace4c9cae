import itertools
import random

import numpy as np
import pytest

from cgtree.master import DualSolution, MasterError, RestrictedMaster
from cgtree.tree import Path, TreeTopology

from conftest import make_candidates, make_dataset, random_dataset


def depth1_fixture():
    d = make_dataset([[1.0], [2.0], [3.0], [4.0]], [0, 0, 1, 1])
    cand = make_candidates([[(0, 1.5), (0, 2.5), (0, 3.5)]])
    topo = TreeTopology(1)
    return d, cand, topo


def sid(cand, feature, threshold):
    out = cand.id_of(feature, threshold)
    assert out is not None
    return out


def test_add_column_and_duplicate():
    d, cand, topo = depth1_fixture()
    m = RestrictedMaster(topo, cand, d, mode="none")
    s = sid(cand, 0, 2.5)
    assert m.add_column(Path(1, (s,), 0)) == 0
    assert m.add_column(Path(1, (s,), 0)) is None
    assert m.add_column(Path(1, (s,), 1)) == 1


def test_add_column_foreign_split():
    d, cand, topo = depth1_fixture()
    restricted = make_candidates([[(0, 1.5)]])
    m = RestrictedMaster(topo, restricted, d, mode="none")
    with pytest.raises(MasterError):
        m.add_column(Path(1, (99,), 0))


def test_solve_forced_solution():
    d, cand, topo = depth1_fixture()
    m = RestrictedMaster(topo, cand, d, mode="none")
    s = sid(cand, 0, 2.5)
    m.add_column(Path(1, (s,), 0))   # rows {1,2}, both class 0 -> CP 2
    m.add_column(Path(2, (s,), 1))   # rows {3,4}, both class 1 -> CP 2
    sol = m.solve_lp()
    assert sol.objective == pytest.approx(4.0)
    assert sol.x == pytest.approx([1.0, 1.0])
    assert m.columns[0].correct == 2
    assert m.columns[1].correct == 2


def test_duplicate_cp_columns_keep_objective():
    d, cand, topo = depth1_fixture()
    m = RestrictedMaster(topo, cand, d, mode="none")
    s = sid(cand, 0, 2.5)
    m.add_column(Path(1, (s,), 0))
    m.add_column(Path(2, (s,), 1))
    before = m.solve_lp().objective
    m.add_column(Path(1, (s,), 1))   # same leaf, zero-CP alternative target
    after = m.solve_lp().objective
    assert after == pytest.approx(before)


def test_missing_leaf_column_rejected():
    d, cand, topo = depth1_fixture()
    m = RestrictedMaster(topo, cand, d, mode="none")
    m.add_column(Path(1, (sid(cand, 0, 2.5),), 0))
    with pytest.raises(MasterError, match="no column for leaves"):
        m.solve_lp()


def test_lp_value_bounds_integer_selection():
    d, cand, topo = depth1_fixture()
    m = RestrictedMaster(topo, cand, d, mode="none")
    a, b = sid(cand, 0, 1.5), sid(cand, 0, 2.5)
    m.add_column(Path(1, (a,), 0))
    m.add_column(Path(1, (b,), 0))
    m.add_column(Path(2, (b,), 1))
    sol = m.solve_lp()
    # Enumerate integer selections: one column per leaf, consistent splits.
    best = -1
    for c1 in (0, 1):
        for c2 in (2,):
            if m.columns[c1].splits == m.columns[c2].splits:
                best = max(best, m.columns[c1].correct + m.columns[c2].correct)
    assert best == 4
    assert sol.objective >= best - 1e-9


def test_lp_monotone_in_columns_and_cuts():
    rng = random.Random(5)
    d = random_dataset(rng, max_rows=30, max_features=2, max_classes=2)
    pairs = [[(0, 0.5), (0, 1.5), (1, 0.5)]] * 3
    cand = make_candidates(pairs)
    topo = TreeTopology(2)
    m = RestrictedMaster(topo, cand, d, mode="eq")
    ids = cand.per_node[0]
    added = 0
    values = []
    for leaf in topo.leaves:
        nodes = topo.path_nodes(leaf)
        m.add_column(Path(leaf, tuple(ids[0] for _ in nodes), 0))
    values.append(m.solve_lp().objective)
    for leaf in topo.leaves:
        nodes = topo.path_nodes(leaf)
        for combo in itertools.product(*(cand.node_splits(j) for j in nodes)):
            for t in range(d.num_classes):
                if m.add_column(Path(leaf, tuple(combo), t)) is not None:
                    added += 1
    assert added > 0
    values.append(m.solve_lp().objective)
    assert values[1] >= values[0] - 1e-9   # columns never hurt
    sol = m.solve_lp()
    proposals = m.violated_row_cuts(sol)
    for dirs, sense, src in proposals:
        m.add_cut(dirs, sense, "inspection", src)
    if proposals:
        values.append(m.solve_lp().objective)
        assert values[2] <= values[1] + 1e-9   # cuts never help

    report = m.lp.verify(m.lp.solve())
    assert report["duality_gap"] <= 1e-6 * max(1.0, abs(values[-1]))


def test_violated_row_cuts_by_mode():
    d, cand, topo = depth1_fixture()
    s15, s35 = sid(cand, 0, 1.5), sid(cand, 0, 3.5)
    results = {}
    for mode in ("ub", "eq", "lb", "none"):
        m = RestrictedMaster(topo, cand, d, mode=mode)
        # Row 0 (v=1) follows both columns: left of 1.5 and left of 3.5.
        m.add_column(Path(1, (s15,), 0))
        m.add_column(Path(1, (s35,), 0))
        sol = DualSolution(
            objective=0.0,
            alpha=np.zeros(topo.num_leaves),
            gamma={},
            beta=np.zeros(0),
            x=np.array([0.6, 0.6]),
            rho={},
            num_internal=topo.num_internal,
        )
        results[mode] = m.violated_row_cuts(sol)
    # Row 0 coverage = 1.2: violates ub and eq, not lb; mode none is silent.
    assert any(src == 0 for _, _, src in results["ub"])
    assert any(src == 0 for _, _, src in results["eq"])
    assert all(src != 0 for _, _, src in results["lb"])
    assert results["none"] == []
    # Row 3 (v=4) follows neither column: coverage 0 violates eq and lb.
    assert any(src == 3 for _, _, src in results["eq"])
    assert any(src == 3 for _, _, src in results["lb"])
    assert all(src != 3 for _, _, src in results["ub"])


def test_integral_solution_emits_no_cuts():
    d, cand, topo = depth1_fixture()
    m = RestrictedMaster(topo, cand, d, mode="eq")
    s = sid(cand, 0, 2.5)
    m.add_column(Path(1, (s,), 0))
    m.add_column(Path(2, (s,), 1))
    sol = m.solve_lp()
    assert m.violated_row_cuts(sol) == []


def test_mode_all_preinstalls_cuts():
    d, cand, topo = depth1_fixture()
    m = RestrictedMaster(topo, cand, d, mode="all")
    # Four rows but branch signatures may coincide; at least one per distinct
    # signature, and never more than |rows|.
    assert 1 <= len(m.cuts) <= d.num_rows
    assert all(c.sense == "=" for c in m.cuts)
    s = sid(cand, 0, 2.5)
    m.add_column(Path(1, (s,), 0))
    m.add_column(Path(2, (s,), 1))
    sol = m.solve_lp()
    assert sol.objective == pytest.approx(4.0)
    assert m.violated_row_cuts(sol) == []


def _enumerate_pool_optimum(m, topo):
    per_leaf = {leaf: [] for leaf in topo.leaves}
    for c, p in enumerate(m.columns):
        per_leaf[p.leaf].append(c)
    best = -1
    for combo in itertools.product(*(per_leaf[leaf] for leaf in topo.leaves)):
        assign = {}
        ok = True
        value = 0
        for c in combo:
            p = m.columns[c]
            value += p.correct
            for j, s in zip(topo.path_nodes(p.leaf), p.splits):
                if assign.setdefault(j, s) != s:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            best = max(best, value)
    return best


@pytest.mark.parametrize("seed", range(8))
def test_solve_integer_matches_enumeration(seed):
    rng = random.Random(seed)
    d = random_dataset(rng, max_rows=25, max_features=2, max_classes=3)
    pairs = [
        [(rng.randrange(d.num_features), rng.choice([0.5, 1.5, 2.5]))
         for _ in range(2)]
        for _ in range(3)
    ]
    cand = make_candidates(pairs)
    topo = TreeTopology(2)
    m = RestrictedMaster(topo, cand, d, mode="none")
    for leaf in topo.leaves:
        nodes = topo.path_nodes(leaf)
        combos = list(itertools.product(*(cand.node_splits(j) for j in nodes)))
        rng.shuffle(combos)
        for combo in combos[: rng.randint(2, len(combos))]:
            m.add_column(Path(leaf, tuple(combo), rng.randrange(d.num_classes)))
    result = m.solve_integer()
    expected = _enumerate_pool_optimum(m, topo)
    assert result.objective == expected
    assert result.proved
    # One split per internal node across the selected paths.
    assign = {}
    for p in result.selected:
        for j, s in zip(topo.path_nodes(p.leaf), p.splits):
            assert assign.setdefault(j, s) == s
    assert set(assign) <= set(topo.internal_nodes)


def test_solve_integer_single_tree_pool():
    d, cand, topo = depth1_fixture()
    m = RestrictedMaster(topo, cand, d, mode="none")
    s = sid(cand, 0, 2.5)
    c0 = m.add_column(Path(1, (s,), 0))
    c1 = m.add_column(Path(2, (s,), 1))
    result = m.solve_integer(incumbent_cols=[c0, c1])
    assert result.objective == 4
    assert result.tree.thresholds[0] == 2.5
    assert result.tree.targets == [0, 1]


def test_theorem_one_on_integer_solution():
    rng = random.Random(77)
    d = random_dataset(rng, max_rows=40, max_features=3, max_classes=2)
    pairs = [[(f, 0.5) for f in range(d.num_features)]] * 3
    cand = make_candidates(pairs)
    topo = TreeTopology(2)
    m = RestrictedMaster(topo, cand, d, mode="eq")
    for leaf in topo.leaves:
        nodes = topo.path_nodes(leaf)
        for combo in itertools.product(*(cand.node_splits(j) for j in nodes)):
            m.add_column(Path(leaf, tuple(combo), rng.randrange(d.num_classes)))
    result = m.solve_integer()
    for _ in range(200):
        vec = np.array([rng.uniform(-1, 4) for _ in range(d.num_features)])
        followed = 0
        for p in result.selected:
            dirs = topo.path_directions(p.leaf)
            ok = True
            for s, direction in zip(p.splits, dirs):
                split = cand.split(s)
                goes_left = vec[split.feature] <= split.threshold
                if goes_left != (direction == 0):
                    ok = False
                    break
            followed += ok
        assert followed == 1


def test_dump_lp(tmp_path):
    d, cand, topo = depth1_fixture()
    m = RestrictedMaster(topo, cand, d, mode="none")
    s = sid(cand, 0, 2.5)
    m.add_column(Path(1, (s,), 0))
    m.add_column(Path(2, (s,), 1))
    out = tmp_path / "master.lp"
    m.dump_lp(out)
    text = out.read_text()
    assert "alpha_1" in text
    assert "rho_0_" in text
    assert text.startswith("Maximize")
