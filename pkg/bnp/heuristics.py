# bnp/heuristics.py
import logging
from typing import Optional, Tuple

import numpy as np

from learners.eta import EtaKind
from learners.ensemble import SUPPORT_TOL
from master.restricted import ErrorMatrix
from simplex.program import INF, LinearProgram, RowSense
from simplex.solver import LpSolution, LpStatus, RevisedSimplex

log = logging.getLogger(__name__)

INTEGRALITY_TOL = 1e-6
MARGIN_SLACK = 1e-9


def fractional_indices(z: np.ndarray, tol: float = INTEGRALITY_TOL) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return np.flatnonzero(np.abs(z - np.round(z)) > tol)


def rounding_heuristic(lp_sol: LpSolution, em: ErrorMatrix, rho: float) -> Optional[Tuple[np.ndarray, int]]:
    """
    Keep lambda from the relaxation and round every z: 0 where the voted
    margin reaches rho, 1 otherwise. Any such z is feasible.
    """
    if lp_sol.status is not LpStatus.OPTIMAL:
        return None
    n = em.n_examples
    lam = lp_sol.primal[n : n + em.n_columns]
    margins = em.entries @ lam
    z = (margins < rho - MARGIN_SLACK).astype(float)
    return z, int(z.sum())


def branch_select(z: np.ndarray) -> int:
    """Most fractional coordinate; ties go to the lowest index."""
    candidates = fractional_indices(z)
    if len(candidates) == 0:
        raise ValueError("no fractional coordinate to branch on")
    distance = np.round(np.abs(np.asarray(z, dtype=float)[candidates] - 0.5), 12)
    return int(candidates[np.argmin(distance)])


def kept_margin(em: ErrorMatrix, weights: np.ndarray, z: np.ndarray) -> float:
    kept = np.asarray(z) < 0.5
    if not kept.any():
        return float("nan")
    return float(np.min(em.entries[kept] @ weights))


def postprocess_margin(em: ErrorMatrix, weights: np.ndarray, z: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    With z fixed, maximise the smallest margin over the examples it keeps
    (z_i = 0) using only the columns of em:

        max rho'  s.t.  sum_j eta_ij lambda_j >= rho'  (z_i = 0),  sum lambda = 1,  lambda >= 0

    Returns (lambda*, rho*). Falls back to the given weights when the LP
    does not improve on them.
    """
    weights = np.asarray(weights, dtype=float)
    kept = np.flatnonzero(np.asarray(z) < 0.5)
    if len(kept) == 0 or em.n_columns == 0:
        return weights, kept_margin(em, weights, z)

    eta = em.entries[kept]
    m = len(kept)
    lp = LinearProgram([RowSense.GE] * m + [RowSense.EQ], np.concatenate([np.zeros(m), [1.0]]), name="margin")
    for j in range(em.n_columns):
        lp.add_column(0.0, np.append(eta[:, j], 1.0), (0.0, INF))
    lp.add_column(-1.0, np.append(-np.ones(m), 0.0), (-INF, INF))

    sol = RevisedSimplex().solve(lp)
    old_margin = kept_margin(em, weights, z)
    if not sol.is_optimal:
        log.warning(f"margin LP ended {sol.status.value}; keeping incumbent weights")
        return weights, old_margin

    lam = np.maximum(sol.primal[: em.n_columns], 0.0)
    lam /= lam.sum()
    new_margin = float(np.min(eta @ lam))
    if new_margin < old_margin - MARGIN_SLACK:
        return weights, old_margin
    log.debug(f"margin post-processing {old_margin:.6g} -> {new_margin:.6g}")
    return lam, new_margin


def lemma1_reduce(
    sol: Tuple[np.ndarray, np.ndarray],
    em: ErrorMatrix,
    rho: float,
) -> Optional[int]:
    """
    For +-1 errors, a solution that is concentrated enough can be replaced by
    one of its learners alone, which then has margin 1 on every kept example.
    Returns that column index, or None when no reduction applies.
    """
    if em.eta_kind is not EtaKind.PLUS_MINUS:
        return None
    lam, z = (np.asarray(a, dtype=float) for a in sol)
    kept = np.asarray(z) < 0.5
    if not kept.any():
        return None

    support = np.flatnonzero(lam > SUPPORT_TOL)
    if len(support) == 0:
        return None
    eta_kept = em.entries[kept]

    heavy = int(support[np.argmax(lam[support])])
    applies = (
        rho >= 1.0 - MARGIN_SLACK
        or lam[heavy] > (1.0 - rho) / 2.0
        or len(support) < 2.0 / (1.0 - rho)
    )
    if not applies:
        return None

    if np.all(eta_kept[:, heavy] > 0):
        return heavy
    for j in support:
        if np.all(eta_kept[:, j] > 0):
            return int(j)
    log.debug("reduction condition held but no single learner covers the kept examples")
    return None
