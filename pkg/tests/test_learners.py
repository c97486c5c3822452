# tests/test_learners.py
import numpy as np
import pytest

from core.errors import InvalidEnsembleError
from data.dataset import Dataset
from learners.ensemble import BoostedEnsemble, predict, support_indices
from learners.eta import P_MIN, EtaKind, eta_bound, eta_column, eta_value, vote_scores
from learners.stumps import DecisionStump, enumerate_stumps, fit_stump_weighted, stump_edge
from oracles import random_dataset


def test_stump_prediction_rule():
    stump = DecisionStump(feature_index=1, threshold=0.5, polarity=-1)
    X = np.array([[9.0, 0.0], [9.0, 0.5], [9.0, 0.6]])
    np.testing.assert_array_equal(stump.predict(X), [-1.0, -1.0, 1.0])


def test_stump_validates_polarity():
    with pytest.raises(ValueError):
        DecisionStump(0, 0.0, 0)


@pytest.mark.parametrize("seed", range(5))
def test_fit_matches_exhaustive_search(seed):
    rng = np.random.default_rng(seed)
    ds = random_dataset(rng, n=15, d=3)
    w = rng.random(15)
    fitted = fit_stump_weighted(ds, w)
    best = max(stump_edge(s, ds, w) for s in enumerate_stumps(ds))
    assert stump_edge(fitted, ds, w) == pytest.approx(best, abs=1e-12)


def test_fit_prefers_lowest_feature_on_ties():
    x = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    ds = Dataset(x, np.array([1.0, 1.0, -1.0]))
    stump = fit_stump_weighted(ds, np.ones(3))
    assert stump.feature_index == 0
    assert stump.threshold == pytest.approx(1.5)
    assert stump.polarity == 1


def test_fit_on_single_class_classifies_everything():
    ds = Dataset(np.array([[0.0], [1.0], [2.0]]), np.ones(3))
    stump = fit_stump_weighted(ds, np.ones(3))
    np.testing.assert_array_equal(stump.predict(ds.features), 1.0)


def test_fit_rejects_bad_weights(separable_1d):
    with pytest.raises(ValueError):
        fit_stump_weighted(separable_1d, np.zeros(6))
    with pytest.raises(ValueError):
        fit_stump_weighted(separable_1d, -np.ones(6))


def test_class_probabilities_are_laplace_smoothed(separable_1d):
    stump = fit_stump_weighted(separable_1d, np.ones(6))
    # 3 positives on the positive side, 0 on the other
    assert stump.class_prob_pos == pytest.approx(4.0 / 5.0)
    assert stump.class_prob_neg == pytest.approx(1.0 / 5.0)


def test_enumerated_pool_covers_both_polarities(separable_1d):
    pool = enumerate_stumps(separable_1d)
    # 5 midpoints plus two sentinels, two polarities each
    assert len(pool) == 14
    assert len({s.key for s in pool}) == 14


def test_eta_plus_minus_is_label_times_prediction(separable_1d):
    stump = fit_stump_weighted(separable_1d, np.ones(6))
    col = eta_column(stump, separable_1d.features, separable_1d.labels, EtaKind.PLUS_MINUS)
    np.testing.assert_array_equal(col, separable_1d.labels * stump.predict(separable_1d.features))


@pytest.mark.parametrize("kind", list(EtaKind))
def test_eta_values_within_bound(kind, rng):
    ds = random_dataset(rng, 20, 2)
    stump = fit_stump_weighted(ds, rng.random(20))
    col = eta_column(stump, ds.features, ds.labels, kind)
    assert np.all(np.abs(col) <= eta_bound(kind) + 1e-12)
    assert eta_value(stump, ds.features[3], ds.labels[3], kind) == pytest.approx(col[3])


def test_samme_r_clips_probabilities():
    stump = DecisionStump(0, 0.0, 1, class_prob_pos=1.0, class_prob_neg=0.0)
    scores = vote_scores(stump, np.array([[-1.0], [1.0]]), EtaKind.SAMME_R)
    assert scores[0] == pytest.approx(0.5 * np.log((1 - P_MIN) / P_MIN))
    assert scores[1] == pytest.approx(-scores[0])


def _stumps():
    return [DecisionStump(0, 0.5, 1), DecisionStump(1, 0.5, -1), DecisionStump(0, 0.5, 1)]


def test_from_raw_merges_duplicates_and_normalises():
    ens = BoostedEnsemble.from_raw(_stumps(), [1.0, 2.0, 1.0], EtaKind.PLUS_MINUS)
    assert len(ens.stumps) == 2
    assert ens.n_learners == 2
    np.testing.assert_allclose(ens.weights, [0.5, 0.5])


def test_from_raw_drops_zero_weights():
    ens = BoostedEnsemble.from_raw(_stumps(), [0.0, 1.0, 0.0], EtaKind.PLUS_MINUS)
    assert ens.stumps == (DecisionStump(1, 0.5, -1),)


def test_ensemble_rejects_unnormalised_weights():
    with pytest.raises(InvalidEnsembleError):
        BoostedEnsemble(tuple(_stumps()[:2]), np.array([0.3, 0.3]), EtaKind.PLUS_MINUS)
    with pytest.raises(InvalidEnsembleError):
        BoostedEnsemble(tuple(_stumps()[:2]), np.array([1.5, -0.5]), EtaKind.PLUS_MINUS)


def test_vote_tie_goes_to_positive():
    a = DecisionStump(0, 0.5, 1)
    b = DecisionStump(0, 0.5, -1)
    ens = BoostedEnsemble((a, b), np.array([0.5, 0.5]), EtaKind.PLUS_MINUS)
    assert predict(ens, np.array([0.0])) == 1
    assert predict(ens, np.array([1.0])) == 1


def test_empty_ensemble_cannot_vote():
    ens = BoostedEnsemble.from_raw([], [], EtaKind.PLUS_MINUS)
    with pytest.raises(InvalidEnsembleError):
        ens.predict(np.zeros((1, 1)))


def test_accuracy_and_margin(separable_1d):
    stump = fit_stump_weighted(separable_1d, np.ones(6))
    ens = BoostedEnsemble((stump,), np.ones(1), EtaKind.PLUS_MINUS)
    assert ens.accuracy(separable_1d.features, separable_1d.labels) == 1.0
    assert ens.min_margin(separable_1d.features, separable_1d.labels) == 1.0


def test_support_indices():
    assert support_indices(np.array([0.0, 0.2, 1e-12, 0.8])) == [1, 3]
