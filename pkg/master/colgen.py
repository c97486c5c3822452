# master/colgen.py
import logging
import time
from typing import List, Optional

import numpy as np

from core.errors import SimplexError
from data.dataset import Dataset
from learners.eta import EtaKind, eta_column
from learners.stumps import DecisionStump, fit_stump_weighted
from master.restricted import (
    DualValues,
    ErrorMatrix,
    as_z_bounds,
    add_lambda_column,
    build_master,
    extract_duals,
    farkas_duals,
)
from models.schemas import MasterConfig
from simplex.solver import Basis, LpSolution, LpStatus, RevisedSimplex

log = logging.getLogger(__name__)


def price(ds: Dataset, duals: DualValues, kind: EtaKind, tol: float) -> Optional[DecisionStump]:
    """
    Fit a stump on the margin-row duals and return it when its column has
    sum_i eta_ij w_i + v > tol. Exact over the stump class for kind "i".
    """
    w = duals.w
    if w.sum() <= 0.0:
        if duals.v <= tol:
            return None
        # every column prices in; any stump will do
        weights = np.ones(ds.example_count)
    else:
        weights = w

    stump = fit_stump_weighted(ds, weights)
    profit = duals.reduced_profit(eta_column(stump, ds.features, ds.labels, kind))
    if profit > tol:
        return stump
    log.debug(f"pricing found no column (best profit {profit:.3g})")
    return None


class ColumnGeneration:
    """
    Column-generation context around one master LP. The LP and the column
    pool outlive a single solve: branch-and-price reuses them across nodes,
    changing only the z bounds and the warm basis.
    """

    def __init__(self, ds: Dataset, cfg: MasterConfig, em: Optional[ErrorMatrix] = None):
        self.ds = ds
        self.cfg = cfg
        self.n = ds.example_count
        self.em = em if em is not None else ErrorMatrix(self.n, cfg.eta_kind)
        self.solver = RevisedSimplex()
        self.objective_history: List[float] = []
        self.lp_solves = 0
        self.timed_out = False

        if self.em.n_columns == 0:
            seed = fit_stump_weighted(ds, np.ones(self.n))
            self.em.add_learner(ds, seed)
        self.lp = build_master(self.em, cfg.rho)

    @property
    def columns_generated(self) -> int:
        return self.em.n_columns

    def _sync_columns(self):
        # columns added to the shared pool from outside this context
        for j in range(self.lp.n_cols - self.n, self.em.n_columns):
            add_lambda_column(self.lp, self.em.column(j))

    def set_z_bounds(self, z_bounds: Optional[np.ndarray]):
        zb = as_z_bounds(z_bounds, self.n)
        self.lp.set_bounds(zb[:, 0], zb[:, 1], start=0)

    def solve(
        self,
        z_bounds: Optional[np.ndarray] = None,
        basis: Optional[Basis] = None,
        deadline: Optional[float] = None,
    ) -> LpSolution:
        """
        Price until no column improves. With a `deadline` (a time.monotonic()
        value) pricing also stops once it has passed; `timed_out` is then set
        and the returned objective is not a valid bound.
        """
        self._sync_columns()
        self.set_z_bounds(z_bounds)
        self.objective_history = []
        self.timed_out = False

        while True:
            sol = self.solver.solve(self.lp, basis)
            self.lp_solves += 1

            if sol.status is LpStatus.OPTIMAL:
                self.objective_history.append(sol.objective_value)
                duals = extract_duals(sol, self.n)
            elif sol.status is LpStatus.INFEASIBLE:
                duals = farkas_duals(sol, self.n)
            else:
                raise SimplexError("master LP reported unbounded; the objective is bounded below by 0")

            if self.em.n_columns >= self.cfg.max_columns:
                log.debug(f"column cap {self.cfg.max_columns} reached")
                return sol

            stump = price(self.ds, duals, self.cfg.eta_kind, self.cfg.pricing_tolerance)
            if stump is None:
                return sol
            if self.em.contains(stump):
                log.debug(f"priced stump {stump.key} already in the pool, stopping")
                return sol
            if deadline is not None and time.monotonic() >= deadline:
                log.info(f"time limit reached after {self.lp_solves} LP solves")
                self.timed_out = True
                return sol

            j = self.em.add_learner(self.ds, stump)
            add_lambda_column(self.lp, self.em.column(j))
            basis = sol.basis


def colgen_solve(
    ds: Dataset,
    cfg: MasterConfig,
    z_bounds: Optional[np.ndarray],
    em: ErrorMatrix,
) -> LpSolution:
    return ColumnGeneration(ds, cfg, em).solve(z_bounds)
