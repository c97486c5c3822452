# sparsify/mip.py
"""
Sparsification over a fixed column set:

    min  sum_i z_i + sum_j alpha_j y_j
    s.t. sum_j eta_ij lambda_j + (1 + rho) z_i >= rho
         sum_j lambda_j = 1
         lambda_j - y_j <= 0
         sum_{i in I} z_i >= 1          for every separated infeasible subsystem I
         z, y binary, lambda >= 0

Solved by LP-based branch-and-bound on (y, z). Cuts are separated at the
root only, then the tree runs on the strengthened LP.
"""

import heapq
import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from bnp.heuristics import INTEGRALITY_TOL, MARGIN_SLACK, fractional_indices
from core.errors import DimensionMismatchError, NoFeasibleSolutionError
from master.restricted import ErrorMatrix
from models.schemas import SparsifyConfig
from simplex.program import INF, LinearProgram, RowSense
from simplex.solver import Basis, LpSolution, LpStatus, RevisedSimplex
from sparsify.iis import find_iis_cut

log = logging.getLogger(__name__)

OBJECTIVE_SLACK = 1e-9
# pool attempts per separation round, each after dropping one element
SEPARATION_ATTEMPTS = 5


@dataclass
class SparsifyResult:
    y: np.ndarray
    weights: np.ndarray
    z: np.ndarray
    objective: float
    optimal: bool
    nodes: int = 0
    root_bounds: List[float] = field(default_factory=list)
    cuts: List[List[int]] = field(default_factory=list)

    @property
    def selected(self) -> List[int]:
        return [int(j) for j in np.flatnonzero(self.y > 0.5)]


class _Layout:
    def __init__(self, n: int, L: int):
        self.n, self.L = n, L
        self.z = slice(0, n)
        self.lam = slice(n, n + L)
        self.y = slice(n + L, n + 2 * L)


def _build_lp(em: ErrorMatrix, cfg: SparsifyConfig, cuts: List[List[int]]) -> LinearProgram:
    n, L = em.n_examples, em.n_columns
    eta = em.entries
    rows = n + 1 + L + len(cuts)
    senses = [RowSense.GE] * n + [RowSense.EQ] + [RowSense.LE] * L + [RowSense.GE] * len(cuts)
    rhs = np.concatenate([np.full(n, cfg.rho), [1.0], np.zeros(L), np.ones(len(cuts))])
    lp = LinearProgram(senses, rhs, name="sparsify")

    for i in range(n):
        col = np.zeros(rows)
        col[i] = 1.0 + cfg.rho
        for k, cut in enumerate(cuts):
            if i in cut:
                col[n + 1 + L + k] = 1.0
        lp.add_column(1.0, col, (0.0, 1.0))
    for j in range(L):
        col = np.zeros(rows)
        col[:n] = eta[:, j]
        col[n] = 1.0
        col[n + 1 + j] = 1.0
        lp.add_column(0.0, col, (0.0, INF))
    for j in range(L):
        col = np.zeros(rows)
        col[n + 1 + j] = -1.0
        lp.add_column(cfg.alphas[j], col, (0.0, 1.0))
    return lp


def _round(em: ErrorMatrix, cfg: SparsifyConfig, lam: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    """Feasible point from lambda: open y on its support, z from the margins."""
    lam = np.maximum(lam, 0.0)
    lam = lam / lam.sum()
    y = (lam > INTEGRALITY_TOL).astype(float)
    lam = np.where(y > 0, lam, 0.0)
    lam /= lam.sum()
    z = (em.entries @ lam < cfg.rho - MARGIN_SLACK).astype(float)
    return y, lam, z, float(z.sum() + np.dot(cfg.alphas, y))


def _separate(em: ErrorMatrix, cfg: SparsifyConfig, z_bar: np.ndarray, known: List[List[int]]) -> List[List[int]]:
    pool = [int(i) for i in np.flatnonzero(z_bar <= 0.5)]
    found: List[List[int]] = []
    for _ in range(SEPARATION_ATTEMPTS):
        subset = find_iis_cut(em, cfg.rho, pool)
        if subset is None:
            break
        if subset not in known and subset not in found and z_bar[subset].sum() < 1.0 - INTEGRALITY_TOL:
            found.append(subset)
        # look for a different subsystem next time
        pool.remove(subset[0])
    return found


def sparsify(em: ErrorMatrix, cfg: SparsifyConfig) -> SparsifyResult:
    n, L = em.n_examples, em.n_columns
    if L == 0:
        raise ValueError("sparsification needs at least one column")
    if len(cfg.alphas) != L:
        raise DimensionMismatchError(f"{len(cfg.alphas)} complexity costs for {L} columns")

    layout = _Layout(n, L)
    solver = RevisedSimplex()
    cuts: List[List[int]] = []
    root_bounds: List[float] = []

    lp = _build_lp(em, cfg, cuts)
    root = solver.solve(lp)
    for _ in range(cfg.cut_rounds):
        if not root.is_optimal:
            break
        root_bounds.append(root.objective_value)
        new = _separate(em, cfg, root.primal[layout.z], cuts)
        if not new:
            break
        cuts.extend(new)
        lp = _build_lp(em, cfg, cuts)
        root = solver.solve(lp)
    if root.is_optimal and (not root_bounds or root_bounds[-1] != root.objective_value):
        root_bounds.append(root.objective_value)
    log.info(f"sparsify N={n} L={L} cuts={len(cuts)} root_bound={root_bounds[-1] if root_bounds else float('nan'):.6g}")

    best: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray, float]] = None

    def offer(candidate):
        nonlocal best
        if best is None or candidate[3] < best[3] - OBJECTIVE_SLACK:
            best = candidate

    counter = itertools.count()
    base_lo = lp.lower.copy()
    base_hi = lp.upper.copy()
    queue: List[Tuple[float, int, np.ndarray, np.ndarray, Optional[Basis]]] = [
        (-INF, next(counter), base_lo, base_hi, None)
    ]
    nodes = 0
    optimal = True

    while queue:
        if nodes >= cfg.max_nodes:
            optimal = False
            break
        bound, _, lo, hi, basis = heapq.heappop(queue)
        if best is not None and bound >= best[3] - OBJECTIVE_SLACK:
            continue

        lp.set_bounds(lo, hi)
        sol: LpSolution = solver.solve(lp, basis)
        nodes += 1
        if sol.status is not LpStatus.OPTIMAL:
            continue
        if best is not None and sol.objective_value >= best[3] - OBJECTIVE_SLACK:
            continue

        x = sol.primal
        lam = x[layout.lam]
        if lam.sum() > 0:
            offer(_round(em, cfg, lam))

        frac_y = fractional_indices(x[layout.y])
        frac_z = fractional_indices(x[layout.z])
        if len(frac_y) == 0 and len(frac_z) == 0:
            offer((np.round(x[layout.y]), lam.copy(), np.round(x[layout.z]), sol.objective_value))
            continue

        if len(frac_y):
            values = x[layout.y]
            k = layout.n + layout.L + int(frac_y[np.argmin(np.abs(values[frac_y] - 0.5))])
        else:
            values = x[layout.z]
            k = int(frac_z[np.argmin(np.abs(values[frac_z] - 0.5))])

        for fixed in (1.0, 0.0):
            child_lo, child_hi = lo.copy(), hi.copy()
            child_lo[k] = child_hi[k] = fixed
            heapq.heappush(queue, (sol.objective_value, next(counter), child_lo, child_hi, sol.basis))

    if best is None:
        raise NoFeasibleSolutionError("sparsification found no feasible selection")

    y, lam, z, objective = best
    if optimal:
        log.info(f"sparsify optimal objective={objective:.6g} learners={int(y.sum())} nodes={nodes}")
    else:
        log.warning(f"sparsify node budget {cfg.max_nodes} exhausted; best objective={objective:.6g}")
    return SparsifyResult(
        y=y, weights=lam, z=z, objective=objective, optimal=optimal, nodes=nodes, root_bounds=root_bounds, cuts=cuts
    )
