# master/restricted.py
"""
Restricted master LP over the current column pool:

    min  sum_i z_i
    s.t. sum_j eta_ij lambda_j + (1 + rho) z_i >= rho   for every example i
         sum_j lambda_j = 1
         lambda >= 0,  lo_i <= z_i <= hi_i

Variable layout: z_0 .. z_{N-1} first, then one lambda per column.
Row layout: N margin rows, then the convexity row.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import DimensionMismatchError, NonOptimalSolutionError
from data.dataset import Dataset
from learners.eta import EtaKind, eta_column
from learners.stumps import DecisionStump
from simplex.program import INF, LinearProgram, RowSense
from simplex.solver import LpSolution, LpStatus

log = logging.getLogger(__name__)

DUAL_TOL = 1e-7


class ErrorMatrix:
    """Column-wise growing N x L matrix of eta values plus the learners behind them."""

    def __init__(self, n_examples: int, eta_kind: EtaKind):
        self.n_examples = n_examples
        self.eta_kind = EtaKind(eta_kind)
        self.column_learners: List[DecisionStump] = []
        self._columns: List[np.ndarray] = []
        self._index: Dict[Tuple[int, float, int], int] = {}

    @classmethod
    def from_learners(cls, ds: Dataset, stumps: Sequence[DecisionStump], eta_kind: EtaKind) -> "ErrorMatrix":
        em = cls(ds.example_count, eta_kind)
        for stump in stumps:
            em.add(stump, eta_column(stump, ds.features, ds.labels, eta_kind))
        return em

    @property
    def n_columns(self) -> int:
        return len(self._columns)

    @property
    def entries(self) -> np.ndarray:
        if not self._columns:
            return np.zeros((self.n_examples, 0))
        return np.column_stack(self._columns)

    def column(self, j: int) -> np.ndarray:
        return self._columns[j]

    def contains(self, stump: DecisionStump) -> bool:
        return stump.key in self._index

    def keys(self) -> List[Tuple[int, float, int]]:
        return [s.key for s in self.column_learners]

    def add(self, stump: DecisionStump, column: np.ndarray) -> int:
        column = np.asarray(column, dtype=float)
        if column.shape != (self.n_examples,):
            raise DimensionMismatchError(f"eta column has shape {column.shape}, expected ({self.n_examples},)")
        if self.eta_kind is not EtaKind.SAMME_R and np.any(np.abs(column) > 1.0 + 1e-12):
            raise ValueError(f"eta values for kind {self.eta_kind.value} must lie in [-1, 1]")
        if stump.key in self._index:
            raise ValueError(f"column for stump {stump.key} already present")

        self._index[stump.key] = len(self._columns)
        self._columns.append(column)
        self.column_learners.append(stump)
        return len(self._columns) - 1

    def add_learner(self, ds: Dataset, stump: DecisionStump) -> int:
        return self.add(stump, eta_column(stump, ds.features, ds.labels, self.eta_kind))

    def restricted(self, columns: Sequence[int]) -> "ErrorMatrix":
        sub = ErrorMatrix(self.n_examples, self.eta_kind)
        for j in columns:
            sub.add(self.column_learners[j], self._columns[j])
        return sub


@dataclass
class DualValues:
    """
    w: margin-row duals, v: convexity-row dual, u: multipliers of the z upper
    bounds. Optimal duals satisfy (1 + rho) w_i - u_i <= 1.
    """

    w: np.ndarray
    v: float
    u: np.ndarray

    def check(self, rho: float, tol: float = DUAL_TOL) -> bool:
        return bool(
            np.all(self.w >= -tol)
            and np.all(self.u >= -tol)
            and np.all((1.0 + rho) * self.w - self.u <= 1.0 + tol)
        )

    def objective(self, rho: float) -> float:
        """Dual objective rho sum(w) + v - sum(u) for the unbranched master."""
        return float(rho * self.w.sum() + self.v - self.u.sum())

    def reduced_profit(self, eta: np.ndarray) -> float:
        """sum_i eta_i w_i + v; a column improves the master when this is positive."""
        return float(eta @ self.w + self.v)


def default_z_bounds(n: int) -> np.ndarray:
    return np.column_stack([np.zeros(n), np.ones(n)])


def as_z_bounds(z_bounds: Optional[np.ndarray], n: int) -> np.ndarray:
    if z_bounds is None:
        return default_z_bounds(n)
    zb = np.asarray(z_bounds, dtype=float)
    if zb.shape != (n, 2):
        raise DimensionMismatchError(f"z bounds have shape {zb.shape}, expected ({n}, 2)")
    return zb


def build_master(em: ErrorMatrix, rho: float, z_bounds: Optional[np.ndarray] = None) -> LinearProgram:
    n = em.n_examples
    zb = as_z_bounds(z_bounds, n)

    senses = [RowSense.GE] * n + [RowSense.EQ]
    rhs = np.concatenate([np.full(n, rho), [1.0]])
    lp = LinearProgram(senses, rhs, name="master")

    for i in range(n):
        col = np.zeros(n + 1)
        col[i] = 1.0 + rho
        lp.add_column(1.0, col, (zb[i, 0], zb[i, 1]))
    for j in range(em.n_columns):
        add_lambda_column(lp, em.column(j))
    return lp


def add_lambda_column(lp: LinearProgram, eta: np.ndarray) -> LinearProgram:
    return lp.add_column(0.0, np.append(eta, 1.0), (0.0, INF))


def extract_duals(sol: LpSolution, n: int) -> DualValues:
    if sol.status is not LpStatus.OPTIMAL:
        raise NonOptimalSolutionError(f"duals requested from a {sol.status.value} master")
    pi = sol.duals
    w = np.maximum(pi[:n], 0.0)
    v = float(pi[n])
    u = np.maximum(0.0, -sol.reduced_costs[:n])
    return DualValues(w=w, v=v, u=u)


def farkas_duals(sol: LpSolution, n: int) -> DualValues:
    """
    Pricing multipliers from the infeasibility ray of a master, scaled to
    max-abs 1. A column with sum_i eta_i w_i + v > 0 breaks the ray.
    """
    ray = np.asarray(sol.farkas, dtype=float)
    scale = float(np.abs(ray).max(initial=0.0)) or 1.0
    ray = ray / scale
    return DualValues(w=np.maximum(ray[:n], 0.0), v=float(ray[n]), u=np.zeros(n))


def master_weights(sol: LpSolution, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Split a master primal vector into (z, lambda)."""
    return sol.primal[:n].copy(), sol.primal[n:].copy()
