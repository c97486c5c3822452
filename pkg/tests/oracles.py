# tests/oracles.py
"""Brute-force reference answers, independent of the package's own LP code."""

import itertools
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import linprog


def margin_feasible(eta: np.ndarray, rho: float) -> bool:
    """Is there lambda >= 0, sum lambda = 1 with eta @ lambda >= rho on every row?"""
    n_rows, n_cols = eta.shape
    if n_cols == 0:
        return False
    if n_rows == 0:
        return True
    res = linprog(
        np.zeros(n_cols),
        A_ub=-eta,
        b_ub=-np.full(n_rows, rho),
        A_eq=np.ones((1, n_cols)),
        b_eq=[1.0],
        bounds=[(0, None)] * n_cols,
        method="highs",
    )
    return res.status == 0


def min_misclassified(eta: np.ndarray, rho: float) -> int:
    """Fewest examples to give up so the rest reach margin rho."""
    n = eta.shape[0]
    for k in range(n + 1):
        for dropped in itertools.combinations(range(n), k):
            kept = np.setdiff1d(np.arange(n), dropped)
            if margin_feasible(eta[kept], rho):
                return k
    raise AssertionError("dropping every example is always feasible")


def min_sparsified(eta: np.ndarray, rho: float, alphas: Sequence[float]) -> float:
    """min sum z + sum alpha y over every learner subset."""
    n, L = eta.shape
    best = np.inf
    for mask in itertools.product([0, 1], repeat=L):
        cols = [j for j in range(L) if mask[j]]
        if not cols:
            continue
        cost = float(np.dot(alphas, mask))
        best = min(best, min_misclassified(eta[:, cols], rho) + cost)
    return best


def vertex_minimum(c: np.ndarray, A: np.ndarray, b: np.ndarray, upper: float) -> Optional[float]:
    """
    min c x s.t. A x <= b, 0 <= x <= upper for two variables, by checking
    every intersection of two constraint lines.
    """
    lines = [(A[r], b[r]) for r in range(len(b))]
    lines += [(np.array([-1.0, 0.0]), 0.0), (np.array([0.0, -1.0]), 0.0)]
    lines += [(np.array([1.0, 0.0]), upper), (np.array([0.0, 1.0]), upper)]
    best = None
    for (a1, b1), (a2, b2) in itertools.combinations(lines, 2):
        M = np.vstack([a1, a2])
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, [b1, b2])
        if np.all(A @ x <= b + 1e-9) and np.all(x >= -1e-9) and np.all(x <= upper + 1e-9):
            val = float(c @ x)
            best = val if best is None else min(best, val)
    return best


def best_profit(eta_columns: Iterable[np.ndarray], w: np.ndarray, v: float) -> float:
    return max(float(col @ w + v) for col in eta_columns)


def random_dataset(rng, n: int, d: int, levels: int = 4):
    """Small integer-valued features so stumps have few distinct thresholds."""
    from data.dataset import Dataset

    x = rng.integers(0, levels, size=(n, d)).astype(float)
    y = rng.choice([-1.0, 1.0], size=n)
    return Dataset(x, y)
