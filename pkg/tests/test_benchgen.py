# tests/test_benchgen.py
import numpy as np
import pytest
from pydantic import ValidationError

from benchgen.hard import LARGE_MARGIN, PENALIZER, PULLER, generate_hard, generate_hard_instance, penalizer_counts
from data.dataset import split
from learners.eta import EtaKind, eta_column
from learners.stumps import DecisionStump
from models.schemas import HardInstanceConfig, SplitSpec
from oracles import margin_feasible


def test_penalizer_counts():
    assert penalizer_counts(21) == (5, 6)


@pytest.mark.parametrize("d", [5, 7, 21, 33])
def test_clean_instance_is_majority_realizable(d):
    inst = generate_hard_instance(HardInstanceConfig(n_points=500, noise_rate=0.0, dimension=d, seed=1))
    ds = inst.dataset
    assert np.all(np.sign(ds.features.sum(axis=1)) == ds.labels)
    assert inst.noise_fraction == 0.0
    np.testing.assert_array_equal(ds.labels, inst.clean_labels)


def test_features_are_signs():
    ds = generate_hard(HardInstanceConfig(n_points=200, noise_rate=0.1, seed=4))
    assert set(np.unique(ds.features)) <= {-1.0, 1.0}
    assert ds.feature_count == 21


def test_example_kinds():
    inst = generate_hard_instance(HardInstanceConfig(n_points=3000, noise_rate=0.0, seed=2))
    x = inst.dataset.features * inst.clean_labels[:, None]
    assert np.all(x[inst.kinds == LARGE_MARGIN] == 1.0)
    assert np.all(x[inst.kinds == PULLER].sum(axis=1) == 1.0)
    assert np.all(x[inst.kinds == PENALIZER].sum(axis=1) == 1.0)
    assert np.all(x[inst.kinds == PENALIZER, :11].sum(axis=1) == 2 * 5 - 11)
    shares = np.bincount(inst.kinds, minlength=3) / 3000
    np.testing.assert_allclose(shares, [0.25, 0.25, 0.5], atol=0.04)


def test_flip_rate_close_to_gamma():
    inst = generate_hard_instance(HardInstanceConfig(n_points=64000, noise_rate=0.1, seed=3))
    assert inst.noise_fraction == pytest.approx(0.1, abs=0.01)
    flipped = inst.dataset.labels != inst.clean_labels
    np.testing.assert_array_equal(flipped, inst.flip_mask)


def test_generation_is_deterministic():
    cfg = HardInstanceConfig(n_points=300, noise_rate=0.2, seed=9)
    a, b = generate_hard(cfg), generate_hard(cfg)
    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.labels, b.labels)
    c = generate_hard(cfg.model_copy(update={"seed": 10}))
    assert not np.array_equal(a.features, c.features)


def test_split_of_generated_instance():
    ds = generate_hard(HardInstanceConfig(n_points=2000, noise_rate=0.1, seed=0))
    train, test = split(ds, SplitSpec(test_fraction=0.2, seed=0))
    assert (train.example_count, test.example_count) == (1600, 400)


def test_coordinate_vote_reaches_margin():
    ds = generate_hard(HardInstanceConfig(n_points=400, noise_rate=0.0, seed=5))
    stumps = [DecisionStump(k, 0.0, -1) for k in range(ds.feature_count)]
    eta = np.column_stack([eta_column(s, ds.features, ds.labels, EtaKind.PLUS_MINUS) for s in stumps])
    assert margin_feasible(eta, 0.04)


@pytest.mark.parametrize("d", [4, 3, 20])
def test_dimension_must_be_odd(d):
    with pytest.raises(ValidationError):
        HardInstanceConfig(n_points=10, dimension=d)


def test_mixture_must_be_distribution():
    with pytest.raises(ValidationError):
        HardInstanceConfig(n_points=10, mixture=(0.5, 0.5, 0.5))
