# learners/stumps.py
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from data.dataset import Dataset

log = logging.getLogger(__name__)

# score ties closer than this keep the earlier (feature, threshold) candidate
TIE_TOL = 1e-12


@dataclass(frozen=True)
class DecisionStump:
    """
    Depth-one tree: predicts +polarity when x[feature_index] <= threshold,
    else -polarity. class_prob_pos / class_prob_neg are P(y = +1) on the
    predicted-positive and predicted-negative side.
    """

    feature_index: int
    threshold: float
    polarity: int
    class_prob_pos: float = 0.5
    class_prob_neg: float = 0.5

    def __post_init__(self):
        if self.polarity not in (-1, 1):
            raise ValueError("polarity must be -1 or +1")
        for p in (self.class_prob_pos, self.class_prob_neg):
            if not 0.0 <= p <= 1.0:
                raise ValueError("class probabilities must lie in [0, 1]")

    @property
    def key(self) -> Tuple[int, float, int]:
        return self.feature_index, self.threshold, self.polarity

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        left = X[:, self.feature_index] <= self.threshold
        return np.where(left, float(self.polarity), float(-self.polarity))

    def prob_positive(self, X: np.ndarray) -> np.ndarray:
        return np.where(self.predict(X) > 0, self.class_prob_pos, self.class_prob_neg)


def _check_weights(ds: Dataset, weights: np.ndarray) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (ds.example_count,):
        raise ValueError(f"expected {ds.example_count} weights, got shape {w.shape}")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    if not np.any(w > 0):
        raise ValueError("weights must not all be zero")
    return w


def _with_probabilities(ds: Dataset, w: np.ndarray, feature: int, threshold: float, polarity: int) -> DecisionStump:
    # Laplace (+1 / +2) on weights rescaled to sum N
    wn = w * (ds.example_count / w.sum())
    bare = DecisionStump(feature, threshold, polarity)
    pos_side = bare.predict(ds.features) > 0
    pos_label = ds.labels > 0

    side_w = wn[pos_side].sum()
    side_pos = wn[pos_side & pos_label].sum()
    other_w = wn[~pos_side].sum()
    other_pos = wn[~pos_side & pos_label].sum()

    return DecisionStump(
        feature_index=feature,
        threshold=threshold,
        polarity=polarity,
        class_prob_pos=float((side_pos + 1.0) / (side_w + 2.0)),
        class_prob_neg=float((other_pos + 1.0) / (other_w + 2.0)),
    )


def _feature_cuts(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Sort one feature and return (order, cut positions, thresholds). A cut at
    position k puts the first k sorted examples on the <= side; positions 0
    and N carry the -inf / +inf sentinels.
    """
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    n = len(values)

    distinct = np.flatnonzero(sorted_vals[1:] > sorted_vals[:-1]) + 1
    cuts = np.concatenate([[0], distinct, [n]])

    lo = sorted_vals[distinct - 1]
    hi = sorted_vals[distinct]
    mid = 0.5 * (lo + hi)
    # adjacent floats: the midpoint may round onto hi
    mid = np.where(mid >= hi, lo, mid)

    thresholds = np.concatenate([[-np.inf], mid, [np.inf]])
    return order, cuts, thresholds


def stump_edge(stump: DecisionStump, ds: Dataset, weights: np.ndarray) -> float:
    """Weighted correctness sum_i w_i y_i h(x_i)."""
    return float(np.dot(weights * ds.labels, stump.predict(ds.features)))


def fit_stump_weighted(ds: Dataset, weights: np.ndarray) -> DecisionStump:
    """
    Exact maximiser of sum_i w_i y_i h(x_i) over all stumps with midpoint
    thresholds. Ties go to the lowest feature index, then the smallest
    threshold, then polarity +1.
    """
    w = _check_weights(ds, weights)
    wy = w * ds.labels
    total = wy.sum()

    best: Optional[Tuple[float, int, float, int]] = None

    for f in range(ds.feature_count):
        order, cuts, thresholds = _feature_cuts(ds.features[:, f])
        left = np.concatenate([[0.0], np.cumsum(wy[order])])[cuts]

        score_pos = 2.0 * left - total
        score_neg = -score_pos

        k_pos = int(np.argmax(score_pos))
        k_neg = int(np.argmax(score_neg))

        if score_pos[k_pos] > score_neg[k_neg] + TIE_TOL:
            candidate = (float(score_pos[k_pos]), f, float(thresholds[k_pos]), 1)
        elif score_neg[k_neg] > score_pos[k_pos] + TIE_TOL:
            candidate = (float(score_neg[k_neg]), f, float(thresholds[k_neg]), -1)
        elif k_neg < k_pos:
            candidate = (float(score_neg[k_neg]), f, float(thresholds[k_neg]), -1)
        else:
            candidate = (float(score_pos[k_pos]), f, float(thresholds[k_pos]), 1)

        if best is None or candidate[0] > best[0] + TIE_TOL:
            best = candidate

    score, feature, threshold, polarity = best
    log.debug(f"stump feature={feature} threshold={threshold} polarity={polarity} edge={score:.6g}")
    return _with_probabilities(ds, w, feature, threshold, polarity)


def enumerate_stumps(ds: Dataset, weights: Optional[np.ndarray] = None) -> List[DecisionStump]:
    """Every candidate the fitter searches, in its tie-breaking order."""
    w = np.ones(ds.example_count) if weights is None else _check_weights(ds, weights)
    pool = []
    for f in range(ds.feature_count):
        _, _, thresholds = _feature_cuts(ds.features[:, f])
        for threshold in thresholds:
            for polarity in (1, -1):
                pool.append(_with_probabilities(ds, w, f, float(threshold), polarity))
    return pool
