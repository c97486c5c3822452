# learners/ensemble.py
import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from core.errors import InvalidEnsembleError
from learners.eta import EtaKind, vote_scores
from learners.stumps import DecisionStump

log = logging.getLogger(__name__)

WEIGHT_SUM_TOL = 1e-9
# weights at or below this count as outside the support
SUPPORT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BoostedEnsemble:
    stumps: Tuple[DecisionStump, ...]
    weights: np.ndarray
    eta_kind: EtaKind
    margin: float = 0.0

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        object.__setattr__(self, "stumps", tuple(self.stumps))
        object.__setattr__(self, "eta_kind", EtaKind(self.eta_kind))

        if weights.ndim != 1 or len(weights) != len(self.stumps):
            raise InvalidEnsembleError("stumps and weights differ in length")
        if len(weights):
            if np.any(weights < 0):
                raise InvalidEnsembleError("ensemble weights must be non-negative")
            if abs(weights.sum() - 1.0) > WEIGHT_SUM_TOL:
                raise InvalidEnsembleError(f"ensemble weights sum to {weights.sum()}, not 1")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def from_raw(
        cls,
        stumps: Sequence[DecisionStump],
        raw_weights: Sequence[float],
        eta_kind: EtaKind,
        margin: float = 0.0,
    ) -> "BoostedEnsemble":
        """Drop non-positive weights, merge repeated stumps, renormalise."""
        merged: Dict[DecisionStump, float] = {}
        for stump, w in zip(stumps, raw_weights):
            if w <= SUPPORT_TOL:
                continue
            merged[stump] = merged.get(stump, 0.0) + float(w)

        if not merged:
            return cls((), np.zeros(0), eta_kind, margin)

        kept = list(merged)
        weights = np.array([merged[s] for s in kept])
        return cls(tuple(kept), weights / weights.sum(), eta_kind, margin)

    @property
    def n_learners(self) -> int:
        """Number of pairwise distinct base learners."""
        return len({s.key for s in self.stumps})

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        if not self.stumps:
            raise InvalidEnsembleError("cannot vote with an empty ensemble")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        total = np.zeros(X.shape[0])
        for stump, w in zip(self.stumps, self.weights):
            total += w * vote_scores(stump, X, self.eta_kind)
        return total

    def predict(self, X: np.ndarray) -> np.ndarray:
        # sum = 0 votes +1
        return np.where(self.decision_function(X) >= 0.0, 1.0, -1.0)

    def accuracy(self, X: np.ndarray, y: np.ndarray) -> float:
        if len(y) == 0:
            return float("nan")
        return float(np.mean(self.predict(X) == y))

    def min_margin(self, X: np.ndarray, y: np.ndarray) -> float:
        return float(np.min(y * self.decision_function(X)))


def predict(ens: BoostedEnsemble, x: np.ndarray) -> int:
    """Label of a single feature row."""
    return int(ens.predict(np.asarray(x, dtype=float).reshape(1, -1))[0])


def support_indices(weights: np.ndarray) -> List[int]:
    return [j for j, w in enumerate(weights) if w > SUPPORT_TOL]
