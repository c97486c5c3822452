# sparsify/iis.py
import logging
from typing import List, Optional, Sequence

import numpy as np

from master.restricted import ErrorMatrix
from simplex.program import INF, LinearProgram, RowSense
from simplex.solver import LpStatus, RevisedSimplex

log = logging.getLogger(__name__)

SUPPORT_TOL = 1e-9


def find_iis_cut(em: ErrorMatrix, rho: float, candidates: Sequence[int]) -> Optional[List[int]]:
    """
    Look for a subset I of candidates whose margin rows

        sum_j eta_ij lambda_j >= rho (i in I),  sum lambda = 1,  lambda >= 0

    cannot hold together. Solves min sum w over the alternative system

        w >= 0, v free,  sum_i eta_ij w_i + v <= 0 (every column j),  rho sum_i w_i + v >= 1

    and returns I = support(w); a vertex optimum has irreducible support.
    Returns None when the margin rows over candidates are satisfiable, which
    is exactly when the alternative system is empty.
    """
    cand = np.asarray(sorted(set(int(i) for i in candidates)), dtype=int)
    if len(cand) == 0:
        return None

    eta = em.entries[cand]  # |I0| x L
    n_cols = em.n_columns
    senses = [RowSense.LE] * n_cols + [RowSense.GE]
    rhs = np.concatenate([np.zeros(n_cols), [1.0]])
    lp = LinearProgram(senses, rhs, name="iis")

    for k in range(len(cand)):
        lp.add_column(1.0, np.append(eta[k], rho), (0.0, INF))
    lp.add_column(0.0, np.append(np.ones(n_cols), 1.0), (-INF, INF))

    sol = RevisedSimplex().solve(lp)
    if sol.status is not LpStatus.OPTIMAL:
        return None

    w = sol.primal[: len(cand)]
    subset = [int(i) for i in cand[w > SUPPORT_TOL]]
    if not subset:
        return None
    log.debug(f"infeasible subsystem of size {len(subset)} from {len(cand)} candidates")
    return subset
