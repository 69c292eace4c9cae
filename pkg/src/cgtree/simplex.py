"""Dense bounded-variable revised simplex with warm starts.

The solver keeps every constraint as an equality by pairing each row with a
logical variable whose bounds encode the sense ('<=': [0, inf), '>=':
(-inf, 0], '=': [0, 0]).  The all-logical basis is therefore always available,
and feasibility after structural edits (new rows, bound changes in
branch-and-bound) is restored by a composite phase-1 that minimizes the total
bound violation of the basic variables.  The basis inverse is maintained
explicitly with product-form updates and periodically refactorized.

Pricing is Dantzig's rule with a Bland fallback after a run of 1000 degenerate
pivots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

INF = math.inf

BASIC, AT_LOWER, AT_UPPER = 0, 1, 2

_SENSE_BOUNDS = {"<=": (0.0, INF), ">=": (-INF, 0.0), "=": (0.0, 0.0)}


class SimplexError(Exception):
    pass


class InfeasibleError(SimplexError):
    pass


class UnboundedError(SimplexError):
    pass


class SingularBasisError(SimplexError):
    pass


class PivotLimitError(SimplexError):
    pass


class _StallError(SimplexError):
    """Internal: a long run of degenerate pivots; caller may perturb."""


@dataclass
class LPSolution:
    objective: float
    x: np.ndarray          # value per variable (structural and logical)
    duals: np.ndarray      # one multiplier per row
    reduced_costs: np.ndarray
    iterations: int
    report: dict = field(default_factory=dict)


class BoundedSimplex:
    """Maximize c'x over Ax {<=,=,>=} b with per-variable bounds."""

    def __init__(self, feas_tol=1e-8, opt_tol=1e-8, refactor_every=128):
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.refactor_every = refactor_every

        self.m = 0
        self.n_struct = 0
        self.nvars = 0
        self._A = np.zeros((16, 16))
        self.b = np.zeros(0)

        # Per-variable registry.
        self.obj = np.zeros(0)
        self.lb = np.zeros(0)
        self.ub = np.zeros(0)
        self.is_logical = np.zeros(0, dtype=bool)
        self.locator = np.zeros(0, dtype=np.int64)  # column index or row index
        self.status = np.zeros(0, dtype=np.int8)

        self.basis: np.ndarray | None = None
        self.binv: np.ndarray | None = None
        self.x_basic: np.ndarray | None = None
        self._pivots_since_refactor = 0
        self.total_pivots = 0
        # Anti-degeneracy: once a solve stalls, bounds stay perturbed by a
        # deterministic spread until an exact solve is requested.  While
        # perturbed, self.lb/self.ub hold the active (spread) bounds and the
        # true ones live in _true_lb/_true_ub.
        self._true_lb: np.ndarray | None = None
        self._true_ub: np.ndarray | None = None
        self._stalled_before = False
        self._noise_scale = 2e-5
        self._noise_salt = 0
        self._ger_buf: np.ndarray | None = None
        # Devex reference weights (approximate steepest edge pricing).
        self._devex: np.ndarray | None = None

    # ------------------------------------------------------------------
    # Problem building
    # ------------------------------------------------------------------
    @property
    def A(self) -> np.ndarray:
        return self._A[: self.m, : self.n_struct]

    def _grow(self, rows: int, cols: int) -> None:
        r = max(rows, self._A.shape[0])
        c = max(cols, self._A.shape[1])
        if r > self._A.shape[0] or c > self._A.shape[1]:
            new = np.zeros((max(r, 2 * self._A.shape[0]), max(c, 2 * self._A.shape[1])))
            new[: self.m, : self.n_struct] = self.A
            self._A = new

    def _register_var(self, obj, lb, ub, logical, loc) -> int:
        vid = self.nvars
        self.obj = np.append(self.obj, obj)
        if self.perturbed:
            self._true_lb = np.append(self._true_lb, lb)
            self._true_ub = np.append(self._true_ub, ub)
            lb, ub = self._spread(vid, lb, ub)
        self.lb = np.append(self.lb, lb)
        self.ub = np.append(self.ub, ub)
        self.is_logical = np.append(self.is_logical, logical)
        self.locator = np.append(self.locator, loc)
        start = AT_LOWER if lb > -INF else AT_UPPER
        self.status = np.append(self.status, start)
        self.nvars += 1
        return vid

    def add_variable(self, obj=0.0, lb=0.0, ub=INF, entries=()) -> int:
        """New structural column; ``entries`` is an iterable of (row, coef)."""
        self._grow(self.m, self.n_struct + 1)
        col = self.n_struct
        self.n_struct += 1
        for row, coef in entries:
            self._A[row, col] = coef
        return self._register_var(obj, lb, ub, False, col)

    def add_row(self, entries, sense: str, rhs: float) -> int:
        """New constraint; ``entries`` is an iterable of (variable id, coef)."""
        if sense not in _SENSE_BOUNDS:
            raise ValueError(f"unknown row sense {sense!r}")
        self._grow(self.m + 1, self.n_struct)
        row = self.m
        self.m += 1
        self.b = np.append(self.b, rhs)
        row_on_basis = None
        if self.basis is not None:
            row_on_basis = np.zeros(len(self.basis))
        for vid, coef in entries:
            if self.is_logical[vid]:
                raise ValueError("cannot reference logical variables in new rows")
            self._A[row, self.locator[vid]] = coef
        lo, hi = _SENSE_BOUNDS[sense]
        logical = self._register_var(0.0, lo, hi, True, row)
        if self.basis is not None:
            # Extend the basis with the new row's logical; the inverse of the
            # bordered basis is [[Binv, 0], [-r' Binv, 1]].
            for slot, vid in enumerate(self.basis):
                if not self.is_logical[vid]:
                    row_on_basis[slot] = self._A[row, self.locator[vid]]
            tail = -row_on_basis @ self.binv
            mb = len(self.basis)
            new_binv = np.zeros((mb + 1, mb + 1))
            new_binv[:mb, :mb] = self.binv
            new_binv[mb, :mb] = tail
            new_binv[mb, mb] = 1.0
            self.binv = new_binv
            self.basis = np.append(self.basis, logical)
            self.status[logical] = BASIC
        return row

    def set_bounds(self, vid: int, lb: float, ub: float) -> None:
        if lb > ub:
            raise ValueError("lower bound above upper bound")
        if self._true_lb is not None:
            self._true_lb[vid] = lb
            self._true_ub[vid] = ub
            lb, ub = self._spread(vid, lb, ub)
        self.lb[vid] = lb
        self.ub[vid] = ub
        if self.status[vid] == AT_LOWER and lb == -INF:
            self.status[vid] = AT_UPPER
        elif self.status[vid] == AT_UPPER and ub == INF:
            self.status[vid] = AT_LOWER

    # ------------------------------------------------------------------
    # Bound perturbation (anti-degeneracy)
    # ------------------------------------------------------------------
    def _noise(self, vid) -> float:
        # Deterministic pseudo-random spread, large enough to break degenerate
        # vertex clusters into sized steps.  The salt rotates when a perturbed
        # solve itself stalls.
        mix = (vid * 2654435761 + self._noise_salt * 40503) % 4093
        return self._noise_scale * (1.0 + mix / 4093.0)

    def _spread(self, vid: int, lb: float, ub: float):
        eps = self._noise(vid)
        return (lb - eps if lb > -INF else lb), (ub + eps if ub < INF else ub)

    @property
    def perturbed(self) -> bool:
        return self._true_lb is not None

    def _apply_noise(self) -> None:
        eps = self._noise(np.arange(self.nvars))
        self.lb = np.where(self._true_lb > -INF, self._true_lb - eps, self._true_lb)
        self.ub = np.where(self._true_ub < INF, self._true_ub + eps, self._true_ub)

    def _enable_perturbation(self) -> None:
        if self.perturbed:
            return
        self._true_lb = self.lb.copy()
        self._true_ub = self.ub.copy()
        self._apply_noise()

    def _reperturb(self) -> None:
        """Fresh, larger spread after a stall inside a perturbed solve."""
        self._noise_salt += 1
        self._noise_scale = min(self._noise_scale * 4.0, 2e-4)
        if self.perturbed:
            self._apply_noise()
        else:
            self._enable_perturbation()

    def _disable_perturbation(self) -> None:
        if not self.perturbed:
            return
        self.lb = self._true_lb
        self.ub = self._true_ub
        self._true_lb = None
        self._true_ub = None
        snap_up = (self.status == AT_LOWER) & (self.lb == -INF)
        self.status[snap_up] = AT_UPPER
        snap_dn = (self.status == AT_UPPER) & (self.ub == INF)
        self.status[snap_dn] = AT_LOWER

    def _retire_perturbation(self, max_pivots: int) -> None:
        """Shrink the spread geometrically with warm re-solves, then drop it.

        Walking the noise down keeps each re-solve near the previous optimum,
        which is far cheaper than de-perturbing in one cold step."""
        while self.perturbed and self._noise_scale > 1e-9:
            self._noise_scale /= 8.0
            self._apply_noise()
            self._solve_from_current(max_pivots, self.total_pivots)
        self._disable_perturbation()
        self._noise_scale = 2e-5

    # ------------------------------------------------------------------
    # Basis and iterate state
    # ------------------------------------------------------------------
    def _init_logical_basis(self) -> None:
        logicals = np.nonzero(self.is_logical)[0]
        order = np.argsort(self.locator[logicals])
        self.basis = logicals[order].astype(np.int64)
        self.status[:] = np.where(self.lb > -INF, AT_LOWER, AT_UPPER)
        self.status[self.basis] = BASIC
        self.binv = np.eye(self.m)
        self._pivots_since_refactor = 0

    def _nonbasic_values(self) -> np.ndarray:
        vals = np.where(self.status == AT_UPPER, self.ub, self.lb)
        vals[self.status == BASIC] = 0.0
        return vals

    def _compute_x_basic(self) -> None:
        vals = self._nonbasic_values()
        rhs = self.b.copy()
        struct = ~self.is_logical
        nz = struct & (vals != 0.0) & (self.status != BASIC)
        if nz.any():
            cols = self.locator[nz]
            rhs -= self.A[:, cols] @ vals[nz]
        nzl = self.is_logical & (vals != 0.0) & (self.status != BASIC)
        for vid in np.nonzero(nzl)[0]:
            rhs[self.locator[vid]] -= vals[vid]
        self.x_basic = self.binv @ rhs

    def _refactor(self) -> None:
        B = np.zeros((self.m, self.m))
        for slot, vid in enumerate(self.basis):
            if self.is_logical[vid]:
                B[self.locator[vid], slot] = 1.0
            else:
                B[:, slot] = self.A[:, self.locator[vid]]
        try:
            self.binv = np.linalg.inv(B)
        except np.linalg.LinAlgError:
            raise SingularBasisError("singular basis matrix") from None
        self._pivots_since_refactor = 0
        self._compute_x_basic()

    def _column(self, vid: int) -> np.ndarray:
        if self.is_logical[vid]:
            col = np.zeros(self.m)
            col[self.locator[vid]] = 1.0
            return col
        return self._A[: self.m, self.locator[vid]].copy()

    def _ftran(self, vid: int) -> np.ndarray:
        if self.is_logical[vid]:
            return self.binv[:, self.locator[vid]].copy()
        return self.binv @ self._A[: self.m, self.locator[vid]]

    def _reduced_costs(self, cost: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        y = self.binv.T @ cost[self.basis]
        d = cost.copy()
        struct = np.nonzero(~self.is_logical)[0]
        if struct.size:
            # Structural columns are created in vid order, so their locators
            # are exactly 0..n_struct-1 and align with the columns of A.
            d[struct] -= y @ self.A
        logic = np.nonzero(self.is_logical)[0]
        if logic.size:
            d[logic] -= y[self.locator[logic]]
        d[self.basis] = 0.0
        return y, d

    # ------------------------------------------------------------------
    # Pivot machinery
    # ------------------------------------------------------------------
    def _choose_entering(self, d: np.ndarray, bland: bool) -> int | None:
        free = self.lb < self.ub
        up = (self.status == AT_LOWER) & free & (d > self.opt_tol)
        down = (self.status == AT_UPPER) & free & (d < -self.opt_tol)
        eligible = up | down
        if not eligible.any():
            return None
        if bland:
            return int(np.nonzero(eligible)[0][0])
        # Devex: largest d^2 / weight steers away from degenerate treadmills
        # that plain largest-|d| pricing falls into.
        gains = np.where(eligible, d * d / self._devex, -1.0)
        return int(np.argmax(gains))

    def _ensure_devex(self) -> None:
        if self._devex is None:
            self._devex = np.ones(self.nvars)
        elif len(self._devex) < self.nvars:
            self._devex = np.concatenate(
                [self._devex, np.ones(self.nvars - len(self._devex))]
            )

    def _devex_update(self, q: int, slot: int, w: np.ndarray) -> None:
        """Forrest-Goldfarb reference-weight update after q replaces the
        variable in basis position ``slot``."""
        wr = w[slot]
        gamma_q = max(float(self._devex[q]), 1.0)
        alpha = np.empty(self.nvars)
        binv_row = self.binv[slot]
        struct = np.nonzero(~self.is_logical)[0]
        if struct.size:
            alpha[struct] = binv_row @ self.A
        logic = np.nonzero(self.is_logical)[0]
        if logic.size:
            alpha[logic] = binv_row[self.locator[logic]]
        ratio = (alpha / wr) ** 2 * gamma_q
        np.maximum(self._devex, ratio, out=self._devex)
        self._devex[self.basis] = 1.0
        leaver = self.basis[slot]   # called before the basis array mutates
        self._devex[leaver] = max(gamma_q / (wr * wr), 1.0)
        if self._devex.max() > 1e8:
            self._devex[:] = 1.0

    def _ratio_test(self, q: int, w: np.ndarray, sigma: float, phase1: bool,
                    bland: bool = False):
        """Max step for entering variable q; returns (t, leaving slot, new status
        of the leaver) with slot None encoding a bound flip.

        Two passes in the style of Harris: the first fixes the step against
        bounds relaxed by a small delta, the second picks -- among blockers
        within that step -- the largest pivot element (or, under Bland's rule,
        the lowest leaving-variable id for its anti-cycling guarantee).
        Entries below the pivot tolerance never leave the basis; the bounded
        drift this allows is healed at refactorization.
        """
        u = sigma * w
        xb = self.x_basic
        lbb = self.lb[self.basis]
        ubb = self.ub[self.basis]
        ft = self.feas_tol
        piv_tol = 1e-7
        delta = 1e-7

        flip_t = self.ub[q] - self.lb[q]
        below = xb < lbb - ft
        above = xb > ubb + ft

        slots: list[np.ndarray] = []
        steps: list[np.ndarray] = []
        relaxed: list[np.ndarray] = []
        statuses: list[int] = []
        groups = [
            ((u > piv_tol) & ~below & ~above & (lbb > -INF), lbb, AT_LOWER),
            ((u < -piv_tol) & ~below & ~above & (ubb < INF), ubb, AT_UPPER),
            # Out-of-bounds basics block at their violated bound: genuine
            # phase-1 moves toward feasibility, or tolerance-scale drift in
            # phase 2 (clamped to a near-zero step so it cannot grow).
            (below & (u < -piv_tol), lbb, AT_LOWER),
            (above & (u > piv_tol), ubb, AT_UPPER),
        ]
        if not phase1:
            groups.append((below & (u > piv_tol), lbb, AT_LOWER))
            groups.append((above & (u < -piv_tol), ubb, AT_UPPER))
        for mask, bound, to_status in groups:
            idx = np.nonzero(mask)[0]
            if idx.size == 0:
                continue
            slots.append(idx)
            steps.append(np.maximum((xb[idx] - bound[idx]) / u[idx], 0.0))
            relaxed.append(
                np.maximum((xb[idx] - bound[idx]) / u[idx] + delta / np.abs(u[idx]), 0.0)
            )
            statuses.append(to_status)
        if not slots:
            return flip_t, None, None
        all_slots = np.concatenate(slots)
        all_steps = np.concatenate(steps)
        all_relaxed = np.concatenate(relaxed)
        all_status = np.concatenate(
            [np.full(len(s), st, dtype=np.int8) for s, st in zip(slots, statuses)]
        )
        t_max = float(all_relaxed.min())
        if flip_t < t_max:
            return flip_t, None, None
        within = np.nonzero(all_steps <= t_max)[0]
        if bland:
            pick = within[int(np.argmin(self.basis[all_slots[within]]))]
        else:
            pick = within[int(np.argmax(np.abs(u[all_slots[within]])))]
        return float(all_steps[pick]), int(all_slots[pick]), int(all_status[pick])

    def _pivot(self, q: int, slot: int, w: np.ndarray, t: float, sigma: float,
               leave_status: int) -> None:
        entering_value = (self.lb[q] + t) if sigma > 0 else (self.ub[q] - t)
        self.x_basic -= sigma * t * w
        leaver = self.basis[slot]
        self.status[leaver] = leave_status
        self.status[q] = BASIC
        self.basis[slot] = q
        self.x_basic[slot] = entering_value
        # Product-form update of the inverse, into a reused buffer.
        wr = w[slot]
        if abs(wr) < 1e-12:
            raise SimplexError("zero pivot element")
        adj = w.copy()
        adj[slot] -= 1.0
        adj /= wr
        if self._ger_buf is None or self._ger_buf.shape[0] < self.m:
            self._ger_buf = np.empty((max(2 * self.m, 64),) * 2)
        buf = self._ger_buf[: self.m, : self.m]
        np.outer(adj, self.binv[slot], out=buf)
        self.binv -= buf
        self._pivots_since_refactor += 1
        self.total_pivots += 1

    def _violation_cost(self) -> tuple[np.ndarray, float]:
        cost = np.zeros(self.nvars)
        lbb = self.lb[self.basis]
        ubb = self.ub[self.basis]
        below = self.x_basic < lbb - self.feas_tol
        above = self.x_basic > ubb + self.feas_tol
        cost[self.basis[below]] = 1.0
        cost[self.basis[above]] = -1.0
        total = float((lbb[below] - self.x_basic[below]).sum()
                      + (self.x_basic[above] - ubb[above]).sum())
        return cost, total

    def _iterate(self, phase1: bool, max_pivots: int,
                 stall_signal: int = 0) -> None:
        # Two stall guards: a run of 1000 degenerate pivots engages Bland's
        # rule (anti-cycling; only sized steps disengage it), and -- when the
        # caller enables the signal -- a window of pivots whose combined
        # metric gain stays negligible raises so the caller can perturb.
        # Sporadic micro-steps must not reset either guard, or degenerate
        # treadmills slip through.
        degen_run = 0
        window = 0
        window_start = -math.inf
        window_stalled = False
        self._ensure_devex()
        for _ in range(max_pivots):
            if self._pivots_since_refactor >= self.refactor_every:
                self._refactor()
            if phase1:
                cost, infeas = self._violation_cost()
                if infeas <= self.feas_tol:
                    return
                metric = -infeas
            else:
                cost = self.obj
                metric = float(cost[self.basis] @ self.x_basic)
            if window == 0:
                window_start = metric
            window += 1
            if window >= 1000:
                window_stalled = metric <= window_start + 1e-3 * (1.0 + abs(metric))
                if window_stalled and stall_signal:
                    raise _StallError("negligible progress over the window")
                window = 0
            bland = window_stalled or degen_run >= 1000
            _, d = self._reduced_costs(cost)
            q = self._choose_entering(d, bland)
            if q is None:
                if phase1:
                    raise InfeasibleError("no feasible point (phase-1 optimum > 0)")
                return
            sigma = 1.0 if self.status[q] == AT_LOWER else -1.0
            w = self._ftran(q)
            t, slot, leave_status = self._ratio_test(q, w, sigma, phase1, bland)
            if not np.isfinite(t):
                if phase1:
                    raise SimplexError("unbounded phase-1 direction")
                raise UnboundedError("objective unbounded above")
            if slot is None:
                self.status[q] = AT_UPPER if sigma > 0 else AT_LOWER
                self.x_basic -= sigma * t * w
            else:
                self._devex_update(q, slot, w)
                self._pivot(q, slot, w, t, sigma, leave_status)
            if t <= 1e-9:
                degen_run += 1
            elif t > 1e-7:
                degen_run = 0
        raise PivotLimitError(f"pivot limit exceeded ({max_pivots})")

    # ------------------------------------------------------------------
    # Public solve / inspect
    # ------------------------------------------------------------------
    def solve(self, max_pivots: int = 500_000, exact: bool = False) -> LPSolution:
        """Optimize from the current basis.

        With ``exact`` any active perturbation is walked off first and the
        result is optimal for the true bounds.  Otherwise a solve that stalls
        on degeneracy turns on (or escalates) the persistent bound
        perturbation and continues from the same basis; later solves start
        perturbed right away.  Bound perturbation never affects dual
        feasibility, so pricing against the returned duals stays sound either
        way.
        """
        if self.m == 0:
            raise SimplexError("cannot solve a program with no rows")
        if self.basis is None or len(self.basis) != self.m:
            self._init_logical_basis()
        start_pivots = self.total_pivots
        if exact:
            try:
                if self.perturbed:
                    self._retire_perturbation(max_pivots)
                return self._solve_from_current(max_pivots, start_pivots)
            except (UnboundedError, SingularBasisError):
                self._init_logical_basis()
                self._disable_perturbation()
                return self._solve_from_current(max_pivots, start_pivots)
        if self._stalled_before:
            self._enable_perturbation()
        for _ in range(4):
            try:
                return self._solve_from_current(max_pivots, start_pivots,
                                                stall_signal=1)
            except _StallError:
                self._stalled_before = True
                self._reperturb()
            except (UnboundedError, SingularBasisError):
                # Drifted iterates can fake an unbounded ray or corrupt the
                # basis; restart from the all-logical basis before believing it.
                self._init_logical_basis()
        return self._solve_from_current(max_pivots, start_pivots)

    def _solve_from_current(self, max_pivots: int, start_pivots: int,
                            stall_signal: int = 0) -> LPSolution:
        # Ratio-test drift can leave basics marginally outside their bounds
        # at phase-2 termination; a short extra phase-1/phase-2 round cleans
        # that up.  Stalls are only signalled on the first round.
        for round_no in range(4):
            self._compute_x_basic()
            _, infeas = self._violation_cost()
            if infeas > self.feas_tol:
                self._iterate(phase1=True, max_pivots=max_pivots,
                              stall_signal=stall_signal if round_no == 0 else 0)
            self._iterate(phase1=False, max_pivots=max_pivots,
                          stall_signal=stall_signal if round_no == 0 else 0)
            self._refactor()
            _, infeas = self._violation_cost()
            if infeas <= self.feas_tol:
                return self._solution(self.total_pivots - start_pivots)
        if infeas <= 1e-6:
            return self._solution(self.total_pivots - start_pivots)
        raise SimplexError(f"basic solution infeasible after solve ({infeas:.2e})")

    def _solution(self, iterations: int) -> LPSolution:
        x = self._nonbasic_values()
        x[self.basis] = self.x_basic
        y, d = self._reduced_costs(self.obj)
        objective = float(self.obj @ x)
        sol = LPSolution(objective=objective, x=x, duals=y, reduced_costs=d,
                         iterations=iterations)
        sol.report = self.verify(sol)
        return sol

    def verify(self, sol: LPSolution) -> dict:
        """Primal/dual feasibility residuals and the strong-duality gap."""
        x, y, d = sol.x, sol.duals, sol.reduced_costs
        activity = np.zeros(self.m)
        struct = np.nonzero(~self.is_logical)[0]
        if struct.size:
            activity += self.A @ x[struct]
        for vid in np.nonzero(self.is_logical)[0]:
            activity[self.locator[vid]] += x[vid]
        primal_residual = float(np.abs(activity - self.b).max()) if self.m else 0.0
        finite_lb = np.where(self.lb > -INF, self.lb, -INF)
        finite_ub = np.where(self.ub < INF, self.ub, INF)
        bound_violation = float(
            max(
                np.maximum(finite_lb - x, 0.0).max(initial=0.0),
                np.maximum(x - finite_ub, 0.0).max(initial=0.0),
            )
        )
        free = self.lb < self.ub
        at_lo = (self.status == AT_LOWER) & free
        at_up = (self.status == AT_UPPER) & free
        dual_violation = float(
            max(
                np.maximum(d[at_lo], 0.0).max(initial=0.0),
                np.maximum(-d[at_up], 0.0).max(initial=0.0),
            )
        )
        # Lagrangian bound: y'b plus each variable pushed to its best bound
        # under its reduced cost; costs within tolerance are treated as zero.
        dual_obj = float(y @ self.b)
        pos = d > self.opt_tol
        neg = d < -self.opt_tol
        dual_obj += float((d[pos] * self.ub[pos]).sum()) if pos.any() else 0.0
        dual_obj += float((d[neg] * self.lb[neg]).sum()) if neg.any() else 0.0
        return {
            "primal_residual": primal_residual,
            "bound_violation": bound_violation,
            "dual_violation": dual_violation,
            "duality_gap": abs(sol.objective - dual_obj),
        }

    def dump_lp_text(self, var_names=None, row_names=None) -> str:
        """Problem in CPLEX LP text format for cross-checks with other solvers."""
        def vname(vid):
            if var_names is not None and vid in var_names:
                return var_names[vid]
            return f"x{vid}"

        def rname(row):
            if row_names is not None and row in row_names:
                return row_names[row]
            return f"r{row}"

        lines = ["Maximize", " obj:"]
        terms = [
            f" {'+' if c >= 0 else '-'} {abs(c):.12g} {vname(v)}"
            for v, c in enumerate(self.obj)
            if c != 0.0 and not self.is_logical[v]
        ]
        lines[-1] += "".join(terms) if terms else " 0 x0"
        lines.append("Subject To")
        struct_ids = np.nonzero(~self.is_logical)[0]
        for row in range(self.m):
            logical = None
            for vid in np.nonzero(self.is_logical)[0]:
                if self.locator[vid] == row:
                    logical = vid
                    break
            lo, hi = self.lb[logical], self.ub[logical]
            sense = "=" if lo == hi == 0 else ("<=" if lo == 0 else ">=")
            body = "".join(
                f" {'+' if self._A[row, self.locator[v]] >= 0 else '-'}"
                f" {abs(self._A[row, self.locator[v]]):.12g} {vname(v)}"
                for v in struct_ids
                if self._A[row, self.locator[v]] != 0.0
            )
            lines.append(f" {rname(row)}:{body or ' 0 ' + vname(0)} {sense} {self.b[row]:.12g}")
        lines.append("Bounds")
        for vid in struct_ids:
            lo, hi = self.lb[vid], self.ub[vid]
            hi_txt = "+inf" if hi == INF else f"{hi:.12g}"
            lines.append(f" {lo:.12g} <= {vname(vid)} <= {hi_txt}")
        lines.append("End")
        return "\n".join(lines) + "\n"
