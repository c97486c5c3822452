# baselines/lpboost.py
import logging
from typing import Tuple

import numpy as np

from core.errors import NonOptimalSolutionError
from data.dataset import Dataset
from learners.ensemble import BoostedEnsemble, support_indices
from master.colgen import colgen_solve
from master.restricted import ErrorMatrix
from models.schemas import MasterConfig
from simplex.solver import LpSolution

log = logging.getLogger(__name__)


def lpboost_solve(ds: Dataset, cfg: MasterConfig) -> Tuple[BoostedEnsemble, LpSolution]:
    """Root column generation only: z stays continuous and nothing is branched."""
    n = ds.example_count
    em = ErrorMatrix(n, cfg.eta_kind)
    sol = colgen_solve(ds, cfg, None, em)
    if not sol.is_optimal:
        raise NonOptimalSolutionError(f"LPBoost master ended {sol.status.value}")

    z = sol.primal[:n]
    lam = sol.primal[n : n + em.n_columns]
    support = support_indices(lam)
    weights = lam[support] / lam[support].sum()

    kept = z <= 1e-9
    margin = float(np.min(em.entries[kept][:, support] @ weights)) if kept.any() else float("nan")
    ens = BoostedEnsemble.from_raw([em.column_learners[j] for j in support], weights, cfg.eta_kind, margin=margin)
    log.info(f"lpboost objective={sol.objective_value:.6g} columns={em.n_columns} learners={ens.n_learners}")
    return ens, sol


def lpboost_train(ds: Dataset, cfg: MasterConfig) -> BoostedEnsemble:
    return lpboost_solve(ds, cfg)[0]
