# bnp/tree.py
import heapq
import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from bnp.heuristics import branch_select, fractional_indices, lemma1_reduce, postprocess_margin, rounding_heuristic
from core.config import settings
from core.errors import NoFeasibleSolutionError
from data.dataset import Dataset
from learners.ensemble import BoostedEnsemble, support_indices
from learners.eta import EtaKind
from learners.stumps import DecisionStump
from master.colgen import ColumnGeneration
from master.restricted import default_z_bounds
from models.schemas import MasterConfig
from simplex.solver import Basis, LpStatus

log = logging.getLogger(__name__)

BOUND_SLACK = 1e-6


@dataclass
class BranchNode:
    """Local z bounds (N x 2) plus the parent's relaxation value and basis."""

    z_bounds: np.ndarray
    lp_bound: float
    depth: int = 0
    inherited_columns: int = 0
    basis: Optional[Basis] = None

    def child(self, index: int, value: float, bound: float, columns: int, basis: Optional[Basis]) -> "BranchNode":
        zb = self.z_bounds.copy()
        zb[index] = (value, value)
        return BranchNode(zb, bound, self.depth + 1, columns, basis)


@dataclass
class IncumbentRecord:
    node: int
    elapsed: float
    objective: int
    stumps: Tuple[DecisionStump, ...]
    weights: np.ndarray


@dataclass
class SolverStats:
    nodes_processed: int = 0
    columns_generated: int = 0
    incumbent_value: float = math.inf
    best_solution_time: float = 0.0
    stall_counter: int = 0
    lower_bound: float = 0.0
    root_bound: float = math.nan
    elapsed: float = 0.0
    lp_solves: int = 0
    status: str = "running"
    incumbents: List[IncumbentRecord] = field(default_factory=list)

    def log_line(self, open_nodes: int, depth: int) -> str:
        return (
            f"node={self.nodes_processed} depth={depth} bound={self.lower_bound:.6g} "
            f"incumbent={self.incumbent_value} open={open_nodes} columns={self.columns_generated} "
            f"elapsed={self.elapsed:.2f}"
        )


@dataclass
class _Incumbent:
    z: np.ndarray
    weights: np.ndarray
    objective: int


def _pruned(bound: float, incumbent_value: float) -> bool:
    # objective is integral, so any bound whose ceiling reaches U is done
    return math.ceil(bound - BOUND_SLACK) >= incumbent_value


def ipboost_train(
    ds: Dataset,
    cfg: MasterConfig,
    stall_limit: int = settings.stall_limit,
    time_limit: float = settings.time_limit,
    seed: int = 0,
    reduce_single_learner: bool = False,
    log_every: int = settings.log_every,
) -> Tuple[BoostedEnsemble, SolverStats]:
    """
    Branch-and-price over the z variables.

    Nodes are picked best-bound first; after branching the z_i = 1 child is
    processed immediately (plunging) and its sibling goes to the open queue.
    The column pool is global, so every node prices against every column
    found so far. The search stops when no open node remains, on the time
    limit, or after stall_limit nodes without a better incumbent.
    """
    if stall_limit < 1:
        raise ValueError("stall_limit must be at least 1")

    n = ds.example_count
    start = time.monotonic()
    stats = SolverStats()
    cg = ColumnGeneration(ds, cfg)
    em = cg.em
    incumbent: Optional[_Incumbent] = None

    log.info(f"ipboost start N={n} d={ds.feature_count} rho={cfg.rho} eta={cfg.eta_kind.value} seed={seed}")

    def offer(z: np.ndarray, lam: np.ndarray, objective: int):
        nonlocal incumbent
        if objective >= stats.incumbent_value:
            return
        incumbent = _Incumbent(z.copy(), lam.copy(), objective)
        stats.incumbent_value = objective
        stats.best_solution_time = time.monotonic() - start
        stats.stall_counter = 0
        support = support_indices(lam)
        stats.incumbents.append(
            IncumbentRecord(
                node=stats.nodes_processed,
                elapsed=stats.best_solution_time,
                objective=objective,
                stumps=tuple(em.column_learners[j] for j in support),
                weights=lam[support].copy(),
            )
        )
        log.info(f"incumbent node={stats.nodes_processed} objective={objective} elapsed={stats.best_solution_time:.2f}")

    counter = itertools.count()
    root = BranchNode(default_z_bounds(n), lp_bound=0.0)
    queue: List[Tuple[float, int, BranchNode]] = []
    plunge: Optional[BranchNode] = root

    while plunge is not None or queue:
        stats.elapsed = time.monotonic() - start
        if stats.elapsed >= time_limit:
            stats.status = "time_limit"
            break
        if stats.stall_counter >= stall_limit:
            stats.status = "stall_limit"
            break

        if plunge is not None:
            node, plunge = plunge, None
        else:
            node = heapq.heappop(queue)[2]
        if _pruned(node.lp_bound, stats.incumbent_value):
            continue

        sol = cg.solve(node.z_bounds, node.basis, deadline=start + time_limit)
        stats.nodes_processed += 1
        stats.stall_counter += 1
        stats.columns_generated = em.n_columns
        stats.lp_solves = cg.lp_solves

        if cg.timed_out:
            # the truncated LP still carries usable lambdas, but no bound
            rounded = rounding_heuristic(sol, em, cfg.rho)
            if rounded is not None:
                offer(rounded[0], sol.primal[n : n + em.n_columns], rounded[1])
            stats.status = "time_limit"
            break

        if sol.status is LpStatus.OPTIMAL:
            bound = sol.objective_value
            if node.depth == 0:
                stats.root_bound = bound

            z = sol.primal[:n]
            lam = sol.primal[n : n + em.n_columns]
            rounded = rounding_heuristic(sol, em, cfg.rho)
            if rounded is not None:
                offer(rounded[0], lam, rounded[1])

            if not _pruned(bound, stats.incumbent_value):
                frac = fractional_indices(z)
                if len(frac) == 0:
                    z_int = np.round(z)
                    offer(z_int, lam, int(z_int.sum()))
                else:
                    i = branch_select(z)
                    up = node.child(i, 1.0, bound, em.n_columns, sol.basis)
                    down = node.child(i, 0.0, bound, em.n_columns, sol.basis)
                    heapq.heappush(queue, (down.lp_bound, next(counter), down))
                    plunge = up
        elif node.depth == 0:
            stats.status = "infeasible"
            break

        open_bounds = [entry[0] for entry in queue] + ([plunge.lp_bound] if plunge is not None else [])
        stats.lower_bound = min(open_bounds + [stats.incumbent_value])
        if stats.nodes_processed % log_every == 0:
            stats.elapsed = time.monotonic() - start
            log.info(stats.log_line(len(open_bounds), node.depth))
    else:
        stats.status = "optimal"
        stats.lower_bound = stats.incumbent_value

    stats.elapsed = time.monotonic() - start
    log.info(
        f"ipboost done status={stats.status} nodes={stats.nodes_processed} incumbent={stats.incumbent_value} "
        f"bound={stats.lower_bound:.6g} columns={stats.columns_generated} time_to_best={stats.best_solution_time:.2f} "
        f"elapsed={stats.elapsed:.2f}"
    )

    if incumbent is None:
        raise NoFeasibleSolutionError(
            f"no integer solution after {stats.nodes_processed} nodes (status {stats.status})"
        )

    return _final_ensemble(incumbent, em, cfg, reduce_single_learner), stats


def _final_ensemble(incumbent: _Incumbent, em, cfg: MasterConfig, reduce_single_learner: bool) -> BoostedEnsemble:
    if reduce_single_learner and cfg.eta_kind is EtaKind.PLUS_MINUS:
        j = lemma1_reduce((incumbent.weights, incumbent.z), em, cfg.rho)
        if j is not None:
            log.info(f"single-learner reduction picked column {j}")
            return BoostedEnsemble((em.column_learners[j],), np.ones(1), cfg.eta_kind, margin=1.0)

    support = support_indices(incumbent.weights)
    sub = em.restricted(support)
    weights, margin = postprocess_margin(sub, incumbent.weights[support], incumbent.z)
    return BoostedEnsemble.from_raw(sub.column_learners, weights, cfg.eta_kind, margin=margin)
