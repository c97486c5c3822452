# data/dataset.py
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.errors import DatasetError
from models.schemas import SplitSpec

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Dense examples with labels in {-1, +1}.

    Arrays are made read-only at construction so a dataset can be shared
    between concurrent runs. Zero-example datasets only appear as the
    test side of a split with test_fraction = 0.
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = np.array(self.features, dtype=float)
        labels = np.array(self.labels, dtype=float)

        if features.ndim != 2:
            raise DatasetError("features must be a 2-d matrix")
        if labels.ndim != 1 or labels.shape[0] != features.shape[0]:
            raise DatasetError("labels must be a vector with one entry per row")
        if features.shape[1] < 1:
            raise DatasetError("dataset needs at least one feature")
        if not np.all((labels == 1.0) | (labels == -1.0)):
            raise DatasetError("labels must be -1 or +1")

        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @property
    def example_count(self) -> int:
        return self.features.shape[0]

    @property
    def feature_count(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.example_count

    def take(self, indices: np.ndarray) -> "Dataset":
        indices = np.asarray(indices, dtype=int)
        return Dataset(self.features[indices], self.labels[indices])

    def padded(self, feature_count: int) -> "Dataset":
        if feature_count < self.feature_count:
            raise DatasetError("cannot pad to fewer features")
        if feature_count == self.feature_count:
            return self
        extra = np.zeros((self.example_count, feature_count - self.feature_count))
        return Dataset(np.hstack([self.features, extra]), self.labels)

    def class_counts(self) -> Tuple[int, int]:
        pos = int(np.sum(self.labels > 0))
        return pos, self.example_count - pos


def align(train: Dataset, test: Dataset) -> Tuple[Dataset, Dataset]:
    """Zero-pad both parts to the larger feature dimension."""
    d = max(train.feature_count, test.feature_count)
    return train.padded(d), test.padded(d)


def split(ds: Dataset, spec: SplitSpec) -> Tuple[Dataset, Dataset]:
    n = ds.example_count
    # ceil(N * (1 - f)) with a guard against 0.8 * 10 = 8.000000000000002
    n_train = min(n, math.ceil(n * (1.0 - spec.test_fraction) - 1e-9))
    order = np.random.default_rng(spec.seed).permutation(n)
    train_idx = np.sort(order[:n_train])
    test_idx = np.sort(order[n_train:])
    log.debug(f"split N={n} train={n_train} test={n - n_train} seed={spec.seed}")
    return ds.take(train_idx), ds.take(test_idx)


def subsample(ds: Dataset, cap: int, seed: int) -> Dataset:
    if cap < 1:
        raise DatasetError("subsample cap must be at least 1")
    if ds.example_count <= cap:
        return ds
    order = np.random.default_rng(seed).permutation(ds.example_count)
    log.info(f"Subsampling {cap} of {ds.example_count} points (seed={seed})")
    return ds.take(np.sort(order[:cap]))
