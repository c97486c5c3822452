# tests/test_master.py
import numpy as np
import pytest

from core.errors import DimensionMismatchError, NonOptimalSolutionError
from learners.eta import EtaKind, eta_column
from learners.stumps import DecisionStump, enumerate_stumps
from master.colgen import ColumnGeneration, colgen_solve, price
from master.restricted import (
    DualValues,
    ErrorMatrix,
    as_z_bounds,
    build_master,
    extract_duals,
    master_weights,
)
from models.schemas import MasterConfig
from oracles import best_profit, random_dataset
from simplex.solver import LpStatus, solve

RHO = 0.1


def _single(eta: float) -> ErrorMatrix:
    em = ErrorMatrix(1, EtaKind.PLUS_MINUS)
    em.add(DecisionStump(0, 0.5, 1), np.array([eta]))
    return em


@pytest.mark.parametrize("eta,expected", [(1.0, 0.0), (-1.0, 1.0)])
def test_single_example_master(eta, expected):
    sol = solve(build_master(_single(eta), RHO))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(expected)
    z, lam = master_weights(sol, 1)
    assert lam == pytest.approx([1.0])
    assert z == pytest.approx([expected])


def test_master_without_columns_is_infeasible():
    sol = solve(build_master(ErrorMatrix(3, EtaKind.PLUS_MINUS), RHO))
    assert sol.status is LpStatus.INFEASIBLE
    with pytest.raises(NonOptimalSolutionError):
        extract_duals(sol, 3)


def test_error_matrix_guards():
    em = ErrorMatrix(2, EtaKind.PLUS_MINUS)
    stump = DecisionStump(0, 0.5, 1)
    with pytest.raises(DimensionMismatchError):
        em.add(stump, np.ones(3))
    with pytest.raises(ValueError):
        em.add(stump, np.array([1.5, 0.0]))
    em.add(stump, np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        em.add(stump, np.array([1.0, -1.0]))
    assert em.contains(stump)
    assert em.keys() == [stump.key]


def test_samme_r_columns_may_exceed_one():
    em = ErrorMatrix(1, EtaKind.SAMME_R)
    em.add(DecisionStump(0, 0.5, 1), np.array([3.0]))
    assert em.n_columns == 1


def test_restricted_keeps_requested_columns(rng):
    ds = random_dataset(rng, 10, 2)
    em = ErrorMatrix.from_learners(ds, enumerate_stumps(ds)[:5], EtaKind.PLUS_MINUS)
    sub = em.restricted([1, 3])
    assert sub.n_columns == 2
    np.testing.assert_array_equal(sub.entries, em.entries[:, [1, 3]])


def test_z_bounds_shape_checked():
    with pytest.raises(DimensionMismatchError):
        as_z_bounds(np.zeros((3, 3)), 3)
    assert as_z_bounds(None, 2).tolist() == [[0.0, 1.0], [0.0, 1.0]]


@pytest.mark.parametrize("seed", range(5))
def test_duals_are_feasible_and_strong(seed):
    rng = np.random.default_rng(seed)
    ds = random_dataset(rng, 12, 2)
    em = ErrorMatrix.from_learners(ds, enumerate_stumps(ds)[:6], EtaKind.PLUS_MINUS)
    sol = solve(build_master(em, RHO))
    duals = extract_duals(sol, 12)
    assert duals.check(RHO)
    assert duals.objective(RHO) == pytest.approx(sol.objective_value, abs=1e-7)
    for j in range(em.n_columns):
        assert duals.reduced_profit(em.column(j)) <= 1e-7


def test_dual_check_rejects_bad_values():
    good = DualValues(w=np.array([0.5]), v=0.0, u=np.array([0.0]))
    assert good.check(RHO)
    assert not DualValues(w=np.array([-0.1]), v=0.0, u=np.array([0.0])).check(RHO)
    assert not DualValues(w=np.array([2.0]), v=0.0, u=np.array([0.0])).check(RHO)


@pytest.mark.parametrize("seed", range(5))
def test_price_finds_most_profitable_stump(seed):
    rng = np.random.default_rng(seed)
    ds = random_dataset(rng, 15, 3)
    w = rng.random(15)
    columns = [eta_column(s, ds.features, ds.labels, EtaKind.PLUS_MINUS) for s in enumerate_stumps(ds)]
    best = best_profit(columns, w, 0.0)

    duals = DualValues(w=w, v=-best / 2, u=np.zeros(15))
    stump = price(ds, duals, EtaKind.PLUS_MINUS, 1e-9)
    assert stump is not None
    col = eta_column(stump, ds.features, ds.labels, EtaKind.PLUS_MINUS)
    assert duals.reduced_profit(col) == pytest.approx(best / 2)

    assert price(ds, DualValues(w=w, v=-best - 1.0, u=np.zeros(15)), EtaKind.PLUS_MINUS, 1e-9) is None


def test_price_with_zero_margin_duals(separable_1d):
    zeros = np.zeros(6)
    assert price(separable_1d, DualValues(zeros, 0.5, zeros), EtaKind.PLUS_MINUS, 1e-6) is not None
    assert price(separable_1d, DualValues(zeros, 0.0, zeros), EtaKind.PLUS_MINUS, 1e-6) is None


def test_colgen_on_separable_data_needs_one_column(separable_1d):
    cg = ColumnGeneration(separable_1d, MasterConfig(rho=RHO))
    sol = cg.solve()
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(0.0)
    assert cg.columns_generated == 1


def _needs_pricing(seed):
    ds = random_dataset(np.random.default_rng(seed), 14, 3)
    cg = ColumnGeneration(ds, MasterConfig(rho=RHO))
    cg.solve()
    return ds, cg.lp_solves > 1


def test_colgen_stops_at_deadline():
    checked = 0
    for seed in range(6):
        ds, needs_pricing = _needs_pricing(seed)
        cg = ColumnGeneration(ds, MasterConfig(rho=RHO))
        sol = cg.solve(deadline=0.0)
        assert sol.status is LpStatus.OPTIMAL
        assert cg.timed_out is needs_pricing
        if needs_pricing:
            assert cg.lp_solves == 1
            assert cg.columns_generated == 1
            checked += 1
        # a later solve without a deadline clears the flag
        cg.solve()
        assert not cg.timed_out
    assert checked > 0


@pytest.mark.parametrize("seed", range(6))
def test_colgen_reaches_full_pool_optimum(seed):
    rng = np.random.default_rng(seed)
    ds = random_dataset(rng, 14, 3)
    cg = ColumnGeneration(ds, MasterConfig(rho=RHO))
    sol = cg.solve()
    assert sol.status is LpStatus.OPTIMAL

    history = np.array(cg.objective_history)
    assert np.all(np.diff(history) <= 1e-9)

    pool = enumerate_stumps(ds)
    full = solve(build_master(ErrorMatrix.from_learners(ds, pool, EtaKind.PLUS_MINUS), RHO))
    assert sol.objective_value == pytest.approx(full.objective_value, abs=1e-7)

    duals = extract_duals(sol, 14)
    assert duals.check(RHO)
    columns = [eta_column(s, ds.features, ds.labels, EtaKind.PLUS_MINUS) for s in pool]
    assert best_profit(columns, duals.w, duals.v) <= 1e-6 + 1e-9


def test_contradictory_pair_lp_bound(contradictory):
    sol = ColumnGeneration(contradictory, MasterConfig(rho=RHO)).solve()
    assert sol.objective_value == pytest.approx(2 * RHO / (1 + RHO))


def test_farkas_pricing_recovers_from_infeasible_start(separable_1d):
    bad = DecisionStump(0, 2.5, -1)
    em = ErrorMatrix.from_learners(separable_1d, [bad], EtaKind.PLUS_MINUS)
    assert np.all(em.column(0) == -1.0)

    z_fixed = np.zeros((6, 2))
    sol = colgen_solve(separable_1d, MasterConfig(rho=RHO), z_fixed, em)
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(0.0)
    assert em.n_columns >= 2


def test_column_cap_stops_generation(rng):
    ds = random_dataset(rng, 14, 3)
    cg = ColumnGeneration(ds, MasterConfig(rho=RHO, max_columns=2))
    cg.solve()
    assert cg.columns_generated <= 2


def test_z_bounds_persist_per_solve(separable_1d):
    em = ErrorMatrix.from_learners(separable_1d, [DecisionStump(0, 2.5, -1)], EtaKind.PLUS_MINUS)
    cg = ColumnGeneration(separable_1d, MasterConfig(rho=RHO, max_columns=1), em)
    zb = np.column_stack([np.zeros(6), np.ones(6)])
    zb[0] = [1.0, 1.0]
    sol = cg.solve(zb)
    z, _ = master_weights(sol, 6)
    assert z[0] == pytest.approx(1.0)
    assert sol.objective_value == pytest.approx(6.0)
