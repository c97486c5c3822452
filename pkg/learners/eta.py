# learners/eta.py
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from learners.stumps import DecisionStump

# SAMME.R probability clipping
P_MIN = 1e-6


class EtaKind(str, Enum):
    PLUS_MINUS = "i"    # y * h(x)
    CLASS_PROB = "ii"   # 2 P(h(x) = y) - 1
    SAMME_R = "iii"     # 1/2 y log(P(+1|x) / P(-1|x))


def vote_scores(stump: "DecisionStump", X: np.ndarray, kind: EtaKind) -> np.ndarray:
    """
    Per-example vote xi(x) of a single stump. Every error function is
    eta = y * xi(x), so voting and the master matrix share this.
    """
    kind = EtaKind(kind)
    if kind is EtaKind.PLUS_MINUS:
        return stump.predict(X)

    p = stump.prob_positive(X)
    if kind is EtaKind.CLASS_PROB:
        return 2.0 * p - 1.0

    p = np.clip(p, P_MIN, 1.0 - P_MIN)
    return 0.5 * np.log(p / (1.0 - p))


def eta_column(stump: "DecisionStump", X: np.ndarray, y: np.ndarray, kind: EtaKind) -> np.ndarray:
    return y * vote_scores(stump, X, kind)


def eta_value(stump: "DecisionStump", x: np.ndarray, y: float, kind: EtaKind) -> float:
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(eta_column(stump, x, np.array([float(y)]), kind)[0])


def eta_bound(kind: EtaKind) -> float:
    """Largest |eta| the error function can produce."""
    if EtaKind(kind) is EtaKind.SAMME_R:
        return 0.5 * float(np.log((1.0 - P_MIN) / P_MIN))
    return 1.0
