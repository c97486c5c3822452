# tests/test_sparsify.py
import numpy as np
import pytest

from core.errors import DimensionMismatchError
from learners.eta import EtaKind
from learners.stumps import DecisionStump
from master.restricted import ErrorMatrix
from models.schemas import SparsifyConfig
from oracles import margin_feasible, min_misclassified, min_sparsified
from sparsify.iis import find_iis_cut
from sparsify.mip import sparsify


def _matrix(eta) -> ErrorMatrix:
    eta = np.asarray(eta, dtype=float)
    em = ErrorMatrix(eta.shape[0], EtaKind.PLUS_MINUS)
    for j in range(eta.shape[1]):
        em.add(DecisionStump(j, 0.5, 1), eta[:, j])
    return em


def _random_matrix(seed, n=6, L=3) -> ErrorMatrix:
    rng = np.random.default_rng(seed)
    return _matrix(rng.choice([-1.0, 1.0], size=(n, L)))


# -----------------------------
# Infeasible subsystems
# -----------------------------

def test_iis_single_bad_example():
    em = _matrix([[1.0], [-1.0], [1.0]])
    assert find_iis_cut(em, 0.05, [1]) == [1]
    assert find_iis_cut(em, 0.05, [0, 1, 2]) == [1]


def test_iis_none_when_all_rows_satisfiable():
    em = _matrix(np.ones((4, 2)))
    assert find_iis_cut(em, 0.05, range(4)) is None


def test_iis_needs_the_pair():
    em = _matrix([[1.0, -1.0], [-1.0, 1.0]])
    assert find_iis_cut(em, 0.5, [0]) is None
    assert find_iis_cut(em, 0.5, [1]) is None
    assert find_iis_cut(em, 0.5, [0, 1]) == [0, 1]


def test_iis_empty_candidates():
    assert find_iis_cut(_matrix([[1.0]]), 0.05, []) is None


@pytest.mark.parametrize("seed", range(10))
def test_iis_cuts_are_valid(seed):
    em = _random_matrix(seed, n=6, L=3)
    rho = 0.2
    subset = find_iis_cut(em, rho, range(6))
    full = margin_feasible(em.entries, rho)
    if subset is None:
        assert full
        return
    assert not full
    assert not margin_feasible(em.entries[subset], rho)


# -----------------------------
# Sparsification MIP
# -----------------------------

def test_sparsify_validates_input():
    with pytest.raises(ValueError):
        sparsify(ErrorMatrix(3, EtaKind.PLUS_MINUS), SparsifyConfig(alphas=[]))
    with pytest.raises(DimensionMismatchError):
        sparsify(_matrix(np.ones((2, 2))), SparsifyConfig(alphas=[0.1]))


@pytest.mark.parametrize("seed", range(6))
def test_sparsify_without_cost_matches_unsparsified_optimum(seed):
    em = _random_matrix(seed)
    rho = 0.1
    result = sparsify(em, SparsifyConfig.uniform(0.0, 3, rho=rho))
    assert result.optimal
    assert result.objective == pytest.approx(min_misclassified(em.entries, rho))


@pytest.mark.parametrize("seed", range(6))
def test_large_cost_selects_one_learner(seed):
    em = _random_matrix(seed)
    rho = 0.1
    result = sparsify(em, SparsifyConfig.uniform(100.0, 3, rho=rho))
    assert len(result.selected) == 1
    best_single = min(min_misclassified(em.entries[:, [j]], rho) for j in range(3))
    assert result.objective == pytest.approx(100.0 + best_single)


@pytest.mark.parametrize("seed", range(8))
def test_sparsify_matches_enumeration(seed):
    em = _random_matrix(seed)
    rho = 0.1
    alphas = [0.3, 0.7, 1.2]
    result = sparsify(em, SparsifyConfig(alphas=alphas, rho=rho))
    assert result.optimal
    assert result.objective == pytest.approx(min_sparsified(em.entries, rho, alphas))

    # the returned point is feasible and scores its objective
    assert result.weights.sum() == pytest.approx(1.0)
    assert np.all(result.weights <= result.y + 1e-9)
    kept = result.z < 0.5
    assert np.all(em.entries[kept] @ result.weights >= rho - 1e-7)
    assert result.z.sum() + np.dot(alphas, result.y) == pytest.approx(result.objective)


@pytest.mark.parametrize("seed", range(6))
def test_tiny_cost_keeps_error_and_minimises_support(seed):
    em = _random_matrix(seed)
    rho = 0.1
    eps = 1e-3
    result = sparsify(em, SparsifyConfig.uniform(eps, 3, rho=rho))
    errors = min_misclassified(em.entries, rho)
    assert result.z.sum() == errors
    fewest = min(
        bin(mask).count("1")
        for mask in range(1, 8)
        if min_misclassified(em.entries[:, [j for j in range(3) if mask >> j & 1]], rho) == errors
    )
    assert len(result.selected) == fewest


@pytest.mark.parametrize("seed", range(6))
def test_cuts_are_valid_and_tighten_root(seed):
    em = _random_matrix(seed, n=8, L=3)
    rho = 0.3
    result = sparsify(em, SparsifyConfig.uniform(0.05, 3, rho=rho))
    for cut in result.cuts:
        assert not margin_feasible(em.entries[cut], rho)
    bounds = np.array(result.root_bounds)
    assert np.all(np.diff(bounds) >= -1e-9)
    assert bounds[-1] <= result.objective + 1e-9


def test_no_cut_rounds_gives_same_optimum():
    em = _random_matrix(3, n=8, L=3)
    with_cuts = sparsify(em, SparsifyConfig.uniform(0.05, 3, rho=0.3))
    without = sparsify(em, SparsifyConfig.uniform(0.05, 3, rho=0.3, cut_rounds=0))
    assert without.cuts == []
    assert with_cuts.objective == pytest.approx(without.objective)


def test_node_budget_reports_non_optimal():
    em = _random_matrix(5, n=8, L=3)
    result = sparsify(em, SparsifyConfig.uniform(0.05, 3, rho=0.3, max_nodes=1, cut_rounds=0))
    assert result.nodes == 1
    assert np.isfinite(result.objective)
