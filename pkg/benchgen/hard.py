# benchgen/hard.py
"""
Noisy majority-vote instances over {-1, +1}^d on which convex-potential
boosters break down.

With a = (d + 1) / 2 leading and b = (d - 1) / 2 trailing coordinates, each
clean example with label y is one of

    large margin  every coordinate equals y
    puller        leading coordinates y, trailing -y
    penalizer     c1 leading and c2 trailing coordinates y, the rest -y

where c1 = (a - 1) // 2 and c2 is the smallest count that keeps the
coordinate sum at least y. So sign(sum_k x_k) = y holds for every clean
example. Labels are then flipped independently with probability gamma.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from data.dataset import Dataset
from models.schemas import HardInstanceConfig

log = logging.getLogger(__name__)

LARGE_MARGIN, PULLER, PENALIZER = 0, 1, 2


@dataclass(frozen=True, eq=False)
class HardInstance:
    dataset: Dataset
    flip_mask: np.ndarray
    clean_labels: np.ndarray
    kinds: np.ndarray

    @property
    def noise_fraction(self) -> float:
        return float(self.flip_mask.mean()) if len(self.flip_mask) else 0.0


def penalizer_counts(d: int) -> tuple:
    a, b = (d + 1) // 2, (d - 1) // 2
    c1 = (a - 1) // 2
    c2 = math.ceil((b + 1 - 2 * c1 + a) / 2)
    return c1, c2


def generate_hard_instance(cfg: HardInstanceConfig) -> HardInstance:
    rng = np.random.default_rng(cfg.seed)
    n, d = cfg.n_points, cfg.dimension
    a = (d + 1) // 2
    b = d - a
    c1, c2 = penalizer_counts(d)

    y = rng.choice([-1.0, 1.0], size=n)
    kinds = rng.choice(3, size=n, p=list(cfg.mixture))

    pattern = np.ones((n, d))
    pattern[kinds == PULLER, a:] = -1.0

    pen = np.flatnonzero(kinds == PENALIZER)
    if len(pen):
        block = -np.ones((len(pen), d))
        lead = np.argsort(rng.random((len(pen), a)), axis=1)[:, :c1]
        trail = a + np.argsort(rng.random((len(pen), b)), axis=1)[:, :c2]
        rows = np.arange(len(pen))[:, None]
        block[rows, lead] = 1.0
        block[rows, trail] = 1.0
        pattern[pen] = block

    features = pattern * y[:, None]
    flip = rng.random(n) < cfg.noise_rate
    labels = np.where(flip, -y, y)

    log.info(
        f"hard instance N={n} d={d} gamma={cfg.noise_rate} seed={cfg.seed} "
        f"kinds={np.bincount(kinds, minlength=3).tolist()} flipped={int(flip.sum())}"
    )
    return HardInstance(Dataset(features, labels), flip, y, kinds)


def generate_hard(cfg: HardInstanceConfig) -> Dataset:
    return generate_hard_instance(cfg).dataset
