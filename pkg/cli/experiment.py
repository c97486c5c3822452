# cli/experiment.py
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from baselines.adaboost import adaboost_train
from baselines.lpboost import lpboost_train
from benchgen.hard import generate_hard
from bnp.tree import SolverStats, ipboost_train
from cli.persistence import save_model
from cli.report import aggregate, write_report, write_trajectory
from core.errors import IPBoostError
from data.dataset import Dataset, align, split, subsample
from data.libsvm import read_libsvm
from learners.ensemble import BoostedEnsemble
from learners.eta import EtaKind
from master.restricted import ErrorMatrix
from models.schemas import (
    AdaBoostConfig,
    AdaBoostVariant,
    Algorithm,
    ExperimentConfig,
    HardInstanceConfig,
    MasterConfig,
    ReportRow,
    SparsifyConfig,
    SplitSpec,
)
from sparsify.mip import sparsify

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    seed: int
    algo: Algorithm
    rho: float
    test_acc: float = float("nan")
    train_acc: float = float("nan")
    n_learners: int = 0
    time_total: float = 0.0
    time_to_best: float = 0.0
    nodes: int = 0
    ensemble: Optional[BoostedEnsemble] = None
    trajectory: List[dict] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class ExperimentReport:
    rows: List[ReportRow]
    runs: List[RunResult]

    @property
    def failures(self) -> List[str]:
        return [f"seed={r.seed} algo={r.algo.value} rho={r.rho}: {r.error}" for r in self.runs if r.failed]


def _percent(ens: BoostedEnsemble, ds: Dataset) -> float:
    return 100.0 * ens.accuracy(ds.features, ds.labels)


def load_split(cfg: ExperimentConfig, seed: int, source: Optional[Tuple[Dataset, Optional[Dataset]]] = None) -> Tuple[Dataset, Dataset]:
    """Train/test pair for one seed, training side subsampled to the cap."""
    if cfg.hard is not None:
        ds = generate_hard(
            HardInstanceConfig(
                n_points=cfg.hard.n_points,
                noise_rate=cfg.hard.noise_rate,
                dimension=cfg.hard.dimension,
                seed=seed,
            )
        )
        train, test = split(ds, SplitSpec(test_fraction=cfg.test_fraction, seed=seed))
    else:
        if source is None:
            source = load_source(cfg)
        ds, companion = source
        if companion is not None:
            train, test = align(ds, companion)
        else:
            train, test = split(ds, SplitSpec(test_fraction=cfg.test_fraction, seed=seed))
    return subsample(train, cfg.subsample_cap, seed), test


def load_source(cfg: ExperimentConfig) -> Tuple[Dataset, Optional[Dataset]]:
    ds = read_libsvm(cfg.data_path)
    test = read_libsvm(cfg.test_path) if cfg.test_path else None
    return ds, test


def _sparsified(ens: BoostedEnsemble, stats: SolverStats, train: Dataset, rho: float, alpha: float) -> BoostedEnsemble:
    em = ErrorMatrix.from_learners(train, ens.stumps, ens.eta_kind)
    result = sparsify(em, SparsifyConfig.uniform(alpha, em.n_columns, rho=rho))
    phase_one = stats.incumbent_value + alpha * em.n_columns
    if not result.optimal and result.objective > phase_one:
        log.info(f"sparsification did not improve ({result.objective:.6g} > {phase_one:.6g}), keeping phase-1 ensemble")
        return ens
    sel = result.selected
    weights = result.weights[sel]
    kept = result.z < 0.5
    margin = float(np.min(em.entries[kept][:, sel] @ (weights / weights.sum()))) if kept.any() else float("nan")
    return BoostedEnsemble.from_raw([em.column_learners[j] for j in sel], weights, ens.eta_kind, margin=margin)


def _train_one(cfg: ExperimentConfig, algo: Algorithm, rho: float, seed: int, train: Dataset, test: Dataset) -> RunResult:
    res = RunResult(seed=seed, algo=algo, rho=rho)
    master_cfg = MasterConfig(rho=rho, eta_kind=cfg.eta_kind, max_columns=cfg.max_columns)
    start = time.monotonic()

    if algo is Algorithm.IPBOOST:
        ens, stats = ipboost_train(train, master_cfg, cfg.stall_limit, cfg.time_limit, seed)
        res.nodes = stats.nodes_processed
        res.time_to_best = stats.best_solution_time
        for rec in stats.incumbents:
            snap = BoostedEnsemble.from_raw(rec.stumps, rec.weights, cfg.eta_kind)
            res.trajectory.append(
                {
                    "seed": seed,
                    "rho": rho,
                    "node": rec.node,
                    "time": rec.elapsed,
                    "objective": rec.objective,
                    "n_learners": snap.n_learners,
                    "train_acc": _percent(snap, train),
                    "test_acc": _percent(snap, test),
                }
            )
        if cfg.sparsify_alpha is not None:
            ens = _sparsified(ens, stats, train, rho, cfg.sparsify_alpha)
    elif algo is Algorithm.LPBOOST:
        ens = lpboost_train(train, master_cfg)
    else:
        ens = adaboost_train(train, AdaBoostConfig(iterations=cfg.ada_iterations, variant=cfg.ada_variant))

    res.time_total = time.monotonic() - start
    if algo is not Algorithm.IPBOOST:
        res.time_to_best = res.time_total
    res.ensemble = ens
    res.n_learners = ens.n_learners
    res.train_acc = _percent(ens, train)
    res.test_acc = _percent(ens, test)
    log.info(
        f"run seed={seed} algo={algo.value} rho={rho} train={res.train_acc:.2f} test={res.test_acc:.2f} "
        f"L={res.n_learners} time={res.time_total:.2f}"
    )
    return res


def run_seed(cfg: ExperimentConfig, seed: int, source: Optional[Tuple[Dataset, Optional[Dataset]]] = None) -> List[RunResult]:
    """Every (algorithm, rho) combination for one seed; failures are recorded, not raised."""
    train, test = load_split(cfg, seed, source)
    results: List[RunResult] = []
    for algo in cfg.algorithms:
        ada_result: Optional[RunResult] = None
        for rho in cfg.rhos:
            if algo is Algorithm.ADABOOST and ada_result is not None:
                # rho plays no part in AdaBoost
                results.append(RunResult(**{**ada_result.__dict__, "rho": rho}))
                continue
            try:
                res = _train_one(cfg, algo, rho, seed, train, test)
            except IPBoostError as e:
                log.error(f"seed={seed} algo={algo.value} rho={rho} failed: {e}")
                res = RunResult(seed=seed, algo=algo, rho=rho, error=str(e))
            if algo is Algorithm.ADABOOST:
                ada_result = res
            results.append(res)
    return results


def _eta_for(cfg: ExperimentConfig, algo: Algorithm) -> EtaKind:
    if algo is Algorithm.ADABOOST:
        return EtaKind.SAMME_R if cfg.ada_variant is AdaBoostVariant.SAMME_R else EtaKind.PLUS_MINUS
    return cfg.eta_kind


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    source = load_source(cfg) if cfg.data_path is not None else None
    seeds = sorted(cfg.seeds)
    log.info(
        f"experiment name={cfg.dataset_name} algos={[a.value for a in cfg.algorithms]} rhos={cfg.rhos} "
        f"seeds={len(seeds)} workers={cfg.workers}"
    )

    by_seed: Dict[int, List[RunResult]] = {}
    if cfg.workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = {seed: pool.submit(run_seed, cfg, seed, source) for seed in seeds}
            for seed, fut in futures.items():
                by_seed[seed] = fut.result()
    else:
        for seed in seeds:
            by_seed[seed] = run_seed(cfg, seed, source)

    runs = [r for seed in seeds for r in by_seed[seed]]
    rows = aggregate(runs, cfg.dataset_name, {a: _eta_for(cfg, a) for a in cfg.algorithms})
    report = ExperimentReport(rows=rows, runs=runs)

    if cfg.output_path:
        write_report(rows, cfg.output_path)
    if cfg.trajectory_path:
        write_trajectory(runs, cfg.trajectory_path)
    if cfg.model_path:
        first = next((r for r in runs if not r.failed), None)
        if first is not None:
            save_model(first.ensemble, cfg.model_path)
        else:
            log.warning("no successful run, model not written")

    for failure in report.failures:
        log.warning(f"failed run {failure}")
    return report
