# baselines/adaboost.py
import logging
from typing import Callable, List, Optional

import numpy as np

from data.dataset import Dataset
from learners.ensemble import BoostedEnsemble
from learners.eta import EtaKind, vote_scores
from learners.stumps import DecisionStump, fit_stump_weighted
from models.schemas import AdaBoostConfig, AdaBoostVariant

log = logging.getLogger(__name__)

ERR_CLIP = 1e-10

RoundHook = Callable[[int, np.ndarray], None]


def _normalise(d: np.ndarray) -> np.ndarray:
    return d / d.sum()


def _discrete(ds: Dataset, cfg: AdaBoostConfig, on_round: Optional[RoundHook]) -> BoostedEnsemble:
    X, y = ds.features, ds.labels
    dist = np.full(ds.example_count, 1.0 / ds.example_count)
    stumps: List[DecisionStump] = []
    alphas: List[float] = []

    for t in range(cfg.iterations):
        if on_round is not None:
            on_round(t, dist)
        stump = fit_stump_weighted(ds, dist)
        pred = stump.predict(X)
        err = float(dist[pred != y].sum())

        if err >= 0.5:
            if not stumps:
                stumps.append(stump)
                alphas.append(1.0)
            log.debug(f"round {t}: weighted error {err:.4f} >= 1/2, stopping")
            break

        clipped = min(max(err, ERR_CLIP), 1.0 - ERR_CLIP)
        alpha = 0.5 * np.log((1.0 - clipped) / clipped)
        stumps.append(stump)
        alphas.append(alpha)
        if err <= 0.0:
            log.debug(f"round {t}: zero weighted error, stopping")
            break
        dist = _normalise(dist * np.exp(-alpha * y * pred))

    return BoostedEnsemble.from_raw(stumps, alphas, EtaKind.PLUS_MINUS)


def _samme_r(ds: Dataset, cfg: AdaBoostConfig, on_round: Optional[RoundHook]) -> BoostedEnsemble:
    X, y = ds.features, ds.labels
    dist = np.full(ds.example_count, 1.0 / ds.example_count)
    stumps: List[DecisionStump] = []

    for t in range(cfg.iterations):
        if on_round is not None:
            on_round(t, dist)
        stump = fit_stump_weighted(ds, dist)
        stumps.append(stump)
        # half log-odds vote of this round
        f = vote_scores(stump, X, EtaKind.SAMME_R)
        dist = _normalise(dist * np.exp(-y * f))

    return BoostedEnsemble.from_raw(stumps, np.ones(len(stumps)), EtaKind.SAMME_R)


def adaboost_train(ds: Dataset, cfg: AdaBoostConfig, on_round: Optional[RoundHook] = None) -> BoostedEnsemble:
    """
    Discrete AdaBoost with exponential reweighting, or its real-valued
    half-log-odds variant. Weights come back normalised to sum 1.
    on_round(t, distribution) sees the example distribution before round t.
    """
    if cfg.variant is AdaBoostVariant.SAMME_R:
        ens = _samme_r(ds, cfg, on_round)
    else:
        ens = _discrete(ds, cfg, on_round)
    log.info(f"adaboost variant={cfg.variant.value} rounds<={cfg.iterations} learners={ens.n_learners}")
    return ens
