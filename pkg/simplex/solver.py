# simplex/solver.py
"""
Bounded-variable revised primal simplex.

Every row r gets a logical variable s_r with A x - s = 0, so row senses
become bounds on s (>= b: s in [b, inf), <= b: s in (-inf, b], = b: s = b).
Variables are indexed logicals first (0 .. m-1), structurals after
(m .. m+n-1); appending a column never renumbers anything, which is what
makes a stored Basis reusable after add_column.

Phase 1 uses one artificial variable t in [0, 1] whose column is the
residual left after clipping the starting basic solution into its bounds.
t starts nonbasic at 1, so the starting point is feasible for the phase 1
problem min t; the original LP is feasible iff t reaches 0. This works from
any warm basis, including one made infeasible by bound changes.
"""

import logging
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from core.errors import DimensionMismatchError, InvalidBoundsError, IterationLimitError
from simplex.program import LinearProgram, RowSense

log = logging.getLogger(__name__)

FEAS_TOL = 1e-7
OPT_TOL = 1e-7
PIVOT_TOL = 1e-10
REFACTOR_EVERY = 50
BLAND_AFTER = 1000
DEGENERATE_STEP = 1e-12
SINGULAR_TOL = 1e-11


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class VarState(IntEnum):
    BASIC = 0
    AT_LOWER = 1
    AT_UPPER = 2
    FREE = 3  # nonbasic free variable sitting at 0


@dataclass
class Basis:
    row_state: np.ndarray
    col_state: np.ndarray
    heads: np.ndarray

    def copy(self) -> "Basis":
        return Basis(self.row_state.copy(), self.col_state.copy(), self.heads.copy())


@dataclass
class LpSolution:
    status: LpStatus
    primal: np.ndarray
    duals: Optional[np.ndarray]
    reduced_costs: Optional[np.ndarray]
    objective_value: float
    basis: Optional[Basis]
    iterations: int = 0
    # Infeasible: y with y_r >= 0 on >= rows, <= 0 on <= rows and
    # y^T b > max over the variable box of y^T A x.
    farkas: Optional[np.ndarray] = None
    # Unbounded: direction of unbounded descent over the structurals.
    ray: Optional[np.ndarray] = None

    @property
    def is_optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _SingularBasis(Exception):
    pass


def _default_state(lo: float, hi: float) -> VarState:
    if np.isfinite(lo):
        return VarState.AT_LOWER
    if np.isfinite(hi):
        return VarState.AT_UPPER
    return VarState.FREE


class RevisedSimplex:
    """Single-threaded, stateful solver. One instance per concurrent job."""

    def __init__(
        self,
        feas_tol: float = FEAS_TOL,
        opt_tol: float = OPT_TOL,
        pivot_tol: float = PIVOT_TOL,
        refactor_every: int = REFACTOR_EVERY,
        bland_after: int = BLAND_AFTER,
        max_iterations: Optional[int] = None,
    ):
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.pivot_tol = pivot_tol
        self.refactor_every = refactor_every
        self.bland_after = bland_after
        self.max_iterations = max_iterations

    # -----------------------------
    # Public entry point
    # -----------------------------
    def solve(self, lp: LinearProgram, warm_basis: Optional[Basis] = None) -> LpSolution:
        self._setup(lp)
        if self.m == 0:
            return self._solve_without_rows()

        if warm_basis is None or not self._load_basis(warm_basis):
            self._cold_basis()
        try:
            self._refactor()
        except _SingularBasis:
            log.debug(f"{lp.name}: warm basis singular, starting cold")
            self._cold_basis()
            self._refactor()

        if not self._phase_one():
            log.debug(f"{lp.name}: infeasible after {self.iterations} iterations")
            return self._infeasible_solution()

        status = self._run(self.cost)
        if status is LpStatus.UNBOUNDED:
            log.debug(f"{lp.name}: unbounded after {self.iterations} iterations")
            return self._unbounded_solution()
        return self._optimal_solution()

    # -----------------------------
    # Setup
    # -----------------------------
    def _setup(self, lp: LinearProgram):
        A = lp.matrix
        if A.shape != (lp.n_rows, lp.n_cols) or lp.rhs.shape != (lp.n_rows,):
            raise DimensionMismatchError("LP matrix, rhs and senses disagree")
        if np.any(lp.lower > lp.upper):
            raise InvalidBoundsError("variable with lower bound above upper bound")

        self.lp = lp
        self.A = A
        self.m, self.n = A.shape
        m = self.m

        row_lo = np.empty(m)
        row_hi = np.empty(m)
        for r, (sense, b) in enumerate(zip(lp.senses, lp.rhs)):
            if sense is RowSense.GE:
                row_lo[r], row_hi[r] = b, np.inf
            elif sense is RowSense.LE:
                row_lo[r], row_hi[r] = -np.inf, b
            else:
                row_lo[r], row_hi[r] = b, b

        self.lo = np.concatenate([row_lo, lp.lower])
        self.hi = np.concatenate([row_hi, lp.upper])
        self.cost = np.concatenate([np.zeros(m), lp.objective])
        self.art_col: Optional[np.ndarray] = None
        self.iterations = 0
        self.cap = self.max_iterations or 100 * (m + self.n)
        self.bland = False
        self.degenerate_run = 0
        self.pi = np.zeros(m)
        self.d = np.zeros(m + self.n)

    @property
    def nt(self) -> int:
        return len(self.lo)

    def _nonbasic_value(self, k: int) -> float:
        s = self.state[k]
        if s == VarState.AT_LOWER:
            return self.lo[k]
        if s == VarState.AT_UPPER:
            return self.hi[k]
        return 0.0

    def _cold_basis(self):
        m = self.m
        self.state = np.array(
            [VarState.BASIC] * m + [_default_state(self.lo[k], self.hi[k]) for k in range(m, self.nt)],
            dtype=np.int8,
        )
        self.heads = np.arange(m)
        self._place_nonbasics()

    def _load_basis(self, basis: Basis) -> bool:
        m, n = self.m, self.n
        if len(basis.row_state) != m or len(basis.heads) != m or len(basis.col_state) > n:
            log.debug("warm basis does not match LP shape, ignoring")
            return False

        state = np.empty(self.nt, dtype=np.int8)
        state[:m] = basis.row_state
        state[m : m + len(basis.col_state)] = basis.col_state
        for k in range(m + len(basis.col_state), self.nt):
            state[k] = _default_state(self.lo[k], self.hi[k])

        heads = np.asarray(basis.heads, dtype=int)
        if len(set(heads.tolist())) != m or heads.min() < 0 or heads.max() >= self.nt:
            return False
        if np.count_nonzero(state == VarState.BASIC) != m or not np.all(state[heads] == VarState.BASIC):
            return False

        # nonbasic states must refer to finite bounds
        for k in np.flatnonzero(state != VarState.BASIC):
            s = state[k]
            if (
                (s == VarState.AT_LOWER and not np.isfinite(self.lo[k]))
                or (s == VarState.AT_UPPER and not np.isfinite(self.hi[k]))
                or (s == VarState.FREE and (np.isfinite(self.lo[k]) or np.isfinite(self.hi[k])))
            ):
                state[k] = _default_state(self.lo[k], self.hi[k])

        self.state = state
        self.heads = heads.copy()
        self._place_nonbasics()
        return True

    def _place_nonbasics(self):
        self.x = np.zeros(self.nt)
        for k in np.flatnonzero(self.state != VarState.BASIC):
            self.x[k] = self._nonbasic_value(k)

    # -----------------------------
    # Linear algebra
    # -----------------------------
    def _column(self, k: int) -> np.ndarray:
        if k < self.m:
            col = np.zeros(self.m)
            col[k] = -1.0
            return col
        if k < self.m + self.n:
            return self.A[:, k - self.m]
        return self.art_col

    def _basis_matrix(self) -> np.ndarray:
        return np.column_stack([self._column(k) for k in self.heads])

    def _refactor(self):
        B = self._basis_matrix()
        lu, piv = lu_factor(B, check_finite=False)
        diag = np.abs(np.diag(lu))
        if diag.min() <= SINGULAR_TOL * max(1.0, diag.max()):
            raise _SingularBasis()
        self.lu = (lu, piv)
        self.etas: List[Tuple[int, np.ndarray]] = []
        self._recompute_basics()

    def _ftran(self, a: np.ndarray) -> np.ndarray:
        y = lu_solve(self.lu, a, check_finite=False)
        for r, alpha in self.etas:
            yr = y[r] / alpha[r]
            y -= alpha * yr
            y[r] = yr
        return y

    def _btran(self, c: np.ndarray) -> np.ndarray:
        c = np.array(c, dtype=float)
        for r, alpha in reversed(self.etas):
            c[r] = (c[r] - (alpha @ c - alpha[r] * c[r])) / alpha[r]
        return lu_solve(self.lu, c, trans=1, check_finite=False)

    def _nonbasic_activity(self) -> np.ndarray:
        """sum of M_k x_k over nonbasic k."""
        m, n = self.m, self.n
        xn = self.x.copy()
        xn[self.heads] = 0.0
        r = self.A @ xn[m : m + n] - xn[:m]
        if self.art_col is not None:
            r = r + self.art_col * xn[m + n]
        return r

    def _recompute_basics(self):
        self.x[self.heads] = self._ftran(-self._nonbasic_activity())

    def _reduced_costs(self, cost: np.ndarray, pi: np.ndarray) -> np.ndarray:
        m, n = self.m, self.n
        d = cost.copy()
        d[:m] += pi
        d[m : m + n] -= self.A.T @ pi
        if self.art_col is not None:
            d[m + n] -= self.art_col @ pi
        return d

    # -----------------------------
    # Phase 1
    # -----------------------------
    def _phase_one(self) -> bool:
        heads = self.heads
        xb = self.x[heads]
        lb, ub = self.lo[heads], self.hi[heads]
        violation = np.maximum(lb - xb, xb - ub)
        if violation.max() <= self.feas_tol:
            return True

        x_hat = np.clip(xb, lb, ub)
        art = -(self._basis_matrix() @ (x_hat - xb))
        scale = float(np.abs(art).max())

        self.art_col = art
        self.lo = np.append(self.lo, 0.0)
        self.hi = np.append(self.hi, 1.0)
        self.cost = np.append(self.cost, 0.0)
        self.state = np.append(self.state, np.int8(VarState.AT_UPPER))
        self.x = np.append(self.x, 1.0)
        self.x[heads] = x_hat

        phase_cost = np.zeros(self.nt)
        phase_cost[-1] = 1.0
        self._run(phase_cost)

        art_index = self.nt - 1
        if self.x[art_index] * scale > self.feas_tol:
            self.farkas = self.pi.copy()
            return False

        if self.state[art_index] == VarState.BASIC:
            self._pivot_out(art_index)
        self._drop_artificial()
        self._refactor()
        return True

    def _pivot_out(self, k_art: int):
        r = int(np.flatnonzero(self.heads == k_art)[0])
        e = np.zeros(self.m)
        e[r] = 1.0
        rho = self._btran(e)
        m, n = self.m, self.n
        row = np.concatenate([-rho, self.A.T @ rho, [0.0]])
        row[self.heads] = 0.0
        row[k_art] = 0.0
        row[(self.hi - self.lo) <= 0.0] *= 1e-3  # prefer movable columns
        k = int(np.argmax(np.abs(row)))
        alpha = self._ftran(self._column(k))
        self.heads[r] = k
        self.state[k] = VarState.BASIC
        self.state[k_art] = VarState.AT_LOWER
        self.x[k_art] = 0.0
        self.etas.append((r, alpha))

    def _drop_artificial(self):
        self.art_col = None
        self.lo = self.lo[:-1]
        self.hi = self.hi[:-1]
        self.cost = self.cost[:-1]
        self.state = self.state[:-1]
        self.x = self.x[:-1]

    # -----------------------------
    # Simplex iterations
    # -----------------------------
    def _run(self, cost: np.ndarray) -> LpStatus:
        while True:
            if self.iterations >= self.cap:
                raise IterationLimitError(
                    f"{self.lp.name}: no verdict after {self.iterations} iterations "
                    f"({self.m} rows, {self.n} columns)"
                )
            self.pi = self._btran(cost[self.heads])
            self.d = self._reduced_costs(cost, self.pi)

            q = self._choose_entering(self.d)
            if q is None:
                return LpStatus.OPTIMAL
            direction = 1.0 if self.d[q] < 0 else -1.0

            alpha = self._ftran(self._column(q))
            step, r, to_upper = self._ratio_test(q, direction, alpha)
            if not np.isfinite(step):
                self.ray_direction = (q, direction, alpha)
                return LpStatus.UNBOUNDED

            self._move(q, direction, alpha, step, r, to_upper)
            self.iterations += 1

    def _choose_entering(self, d: np.ndarray) -> Optional[int]:
        s = self.state
        movable = self.hi > self.lo
        eligible = movable & (
            ((s == VarState.AT_LOWER) & (d < -self.opt_tol))
            | ((s == VarState.AT_UPPER) & (d > self.opt_tol))
            | ((s == VarState.FREE) & (np.abs(d) > self.opt_tol))
        )
        candidates = np.flatnonzero(eligible)
        if len(candidates) == 0:
            return None
        if self.bland:
            return int(candidates[0])
        return int(candidates[np.argmax(np.abs(d[candidates]))])

    def _ratio_test(self, q: int, direction: float, alpha: np.ndarray) -> Tuple[float, Optional[int], bool]:
        """Harris two-pass ratio test. Returns (step, leaving position or None, leaves at upper)."""
        heads = self.heads
        delta = -direction * alpha
        xb = self.x[heads]
        lb, ub = self.lo[heads], self.hi[heads]
        tol = self.pivot_tol * max(1.0, float(np.abs(alpha).max(initial=0.0)))

        dec = delta < -tol
        inc = delta > tol

        relaxed = np.full(self.m, np.inf)
        exact = np.full(self.m, np.inf)
        with np.errstate(invalid="ignore"):
            relaxed[dec] = (xb[dec] - lb[dec] + self.feas_tol) / -delta[dec]
            relaxed[inc] = (ub[inc] - xb[inc] + self.feas_tol) / delta[inc]
            exact[dec] = (xb[dec] - lb[dec]) / -delta[dec]
            exact[inc] = (ub[inc] - xb[inc]) / delta[inc]

        theta = float(relaxed.min()) if self.m else np.inf
        flip = self.hi[q] - self.lo[q]

        if not np.isfinite(theta) and not np.isfinite(flip):
            return np.inf, None, False
        if flip <= theta:
            return float(flip), None, False

        candidates = np.flatnonzero(exact <= theta)
        if self.bland:
            r = int(candidates[np.argmin(heads[candidates])])
        else:
            r = int(candidates[np.argmax(np.abs(delta[candidates]))])
        return max(float(exact[r]), 0.0), r, bool(inc[r])

    def _move(self, q: int, direction: float, alpha: np.ndarray, step: float, r: Optional[int], to_upper: bool):
        heads = self.heads
        self.x[heads] += -direction * alpha * step
        self.x[q] += direction * step

        if r is None:
            self.state[q] = VarState.AT_UPPER if direction > 0 else VarState.AT_LOWER
            self.x[q] = self.hi[q] if direction > 0 else self.lo[q]
        else:
            p = heads[r]
            if to_upper and self.hi[p] > self.lo[p]:
                self.state[p] = VarState.AT_UPPER
                self.x[p] = self.hi[p]
            else:
                self.state[p] = VarState.AT_LOWER
                self.x[p] = self.lo[p] if not to_upper else self.hi[p]
            heads[r] = q
            self.state[q] = VarState.BASIC
            self.etas.append((r, alpha))
            if len(self.etas) >= self.refactor_every:
                self._refactor()

        if step <= DEGENERATE_STEP:
            self.degenerate_run += 1
            if not self.bland and self.degenerate_run >= self.bland_after:
                log.debug(f"{self.lp.name}: {self.degenerate_run} degenerate pivots, switching to Bland's rule")
                self.bland = True
        else:
            self.degenerate_run = 0
            self.bland = False

    # -----------------------------
    # Results
    # -----------------------------
    def _export_basis(self) -> Basis:
        m, n = self.m, self.n
        return Basis(self.state[:m].copy(), self.state[m : m + n].copy(), self.heads.copy())

    def _optimal_solution(self) -> LpSolution:
        m, n = self.m, self.n
        primal = self.x[m : m + n].copy()
        return LpSolution(
            status=LpStatus.OPTIMAL,
            primal=primal,
            duals=self.pi.copy(),
            reduced_costs=self.d[m : m + n].copy(),
            objective_value=float(self.lp.objective @ primal),
            basis=self._export_basis(),
            iterations=self.iterations,
        )

    def _infeasible_solution(self) -> LpSolution:
        m, n = self.m, self.n
        art_basic = self.art_col is not None and self.state[-1] == VarState.BASIC
        return LpSolution(
            status=LpStatus.INFEASIBLE,
            primal=self.x[m : m + n].copy(),
            duals=None,
            reduced_costs=None,
            objective_value=np.nan,
            basis=None if art_basic else self._export_basis(),
            iterations=self.iterations,
            farkas=self.farkas,
        )

    def _unbounded_solution(self) -> LpSolution:
        m, n = self.m, self.n
        q, direction, alpha = self.ray_direction
        ray = np.zeros(self.nt)
        ray[self.heads] = -direction * alpha
        ray[q] = direction
        return LpSolution(
            status=LpStatus.UNBOUNDED,
            primal=self.x[m : m + n].copy(),
            duals=None,
            reduced_costs=None,
            objective_value=-np.inf,
            basis=self._export_basis(),
            iterations=self.iterations,
            ray=ray[m : m + n],
        )

    def _solve_without_rows(self) -> LpSolution:
        c, lo, hi = self.lp.objective, self.lp.lower, self.lp.upper
        x = np.where(c > 0, lo, np.where(c < 0, hi, np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))))
        if not np.all(np.isfinite(x)):
            ray = np.where(np.isfinite(x), 0.0, -np.sign(c))
            return LpSolution(LpStatus.UNBOUNDED, np.nan_to_num(x), None, None, -np.inf, None, ray=ray)
        return LpSolution(LpStatus.OPTIMAL, x, np.zeros(0), c.copy(), float(c @ x), None)


def solve(lp: LinearProgram, warm_basis: Optional[Basis] = None) -> LpSolution:
    return RevisedSimplex().solve(lp, warm_basis)
