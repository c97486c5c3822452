# simplex/program.py
import logging
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import DimensionMismatchError, InvalidBoundsError

log = logging.getLogger(__name__)

INF = np.inf


class RowSense(str, Enum):
    GE = ">="
    LE = "<="
    EQ = "="


class LinearProgram:
    """
    min c^T x  s.t.  A x (>=|<=|=) b,  lo <= x <= hi.

    Columns are stored densely with spare capacity so column generation can
    append without copying the whole matrix each time. Variables keep their
    index forever; a basis saved before add_column stays usable.
    """

    def __init__(self, senses: Sequence[RowSense], rhs: Sequence[float], name: str = "lp"):
        self.name = name
        self.senses: List[RowSense] = [RowSense(s) for s in senses]
        self.rhs = np.asarray(rhs, dtype=float).copy()
        if self.rhs.shape != (len(self.senses),):
            raise DimensionMismatchError("rhs length differs from number of row senses")

        self._n = 0
        self._A = np.zeros((self.n_rows, 8))
        self._c = np.zeros(8)
        self._lo = np.zeros(8)
        self._hi = np.zeros(8)

    # -----------------------------
    # Shape and views
    # -----------------------------
    @property
    def n_rows(self) -> int:
        return len(self.senses)

    @property
    def n_cols(self) -> int:
        return self._n

    @property
    def matrix(self) -> np.ndarray:
        return self._A[:, : self._n]

    @property
    def objective(self) -> np.ndarray:
        return self._c[: self._n]

    @property
    def lower(self) -> np.ndarray:
        return self._lo[: self._n]

    @property
    def upper(self) -> np.ndarray:
        return self._hi[: self._n]

    # -----------------------------
    # Mutation
    # -----------------------------
    def _grow(self):
        cap = max(8, 2 * self._A.shape[1])
        A = np.zeros((self.n_rows, cap))
        A[:, : self._n] = self.matrix
        self._A = A
        for attr in ("_c", "_lo", "_hi"):
            old = getattr(self, attr)
            new = np.zeros(cap)
            new[: self._n] = old[: self._n]
            setattr(self, attr, new)

    def add_column(
        self,
        cost: float,
        coeffs: Sequence[float],
        bounds: Tuple[float, float] = (0.0, INF),
    ) -> "LinearProgram":
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.n_rows,):
            raise DimensionMismatchError(
                f"column has {coeffs.shape[0] if coeffs.ndim else 1} entries, LP has {self.n_rows} rows"
            )
        lo, hi = float(bounds[0]), float(bounds[1])
        if lo > hi:
            raise InvalidBoundsError(f"lower bound {lo} exceeds upper bound {hi}")

        if self._n == self._A.shape[1]:
            self._grow()
        j = self._n
        self._A[:, j] = coeffs
        self._c[j] = cost
        self._lo[j] = lo
        self._hi[j] = hi
        self._n += 1
        return self

    def add_columns(self, costs: Iterable[float], columns: np.ndarray, bounds: Tuple[float, float]) -> "LinearProgram":
        for cost, col in zip(costs, np.asarray(columns, dtype=float).T):
            self.add_column(cost, col, bounds)
        return self

    def set_var_bounds(self, var: int, lo: float, hi: float) -> "LinearProgram":
        if not 0 <= var < self._n:
            raise DimensionMismatchError(f"variable {var} out of range")
        if lo > hi:
            raise InvalidBoundsError(f"lower bound {lo} exceeds upper bound {hi}")
        self._lo[var] = lo
        self._hi[var] = hi
        return self

    def set_bounds(self, lower: np.ndarray, upper: np.ndarray, start: int = 0) -> "LinearProgram":
        """Vectorised set_var_bounds for variables start .. start + len - 1."""
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        stop = start + len(lower)
        if stop > self._n or lower.shape != upper.shape:
            raise DimensionMismatchError("bound vectors do not fit the LP")
        if np.any(lower > upper):
            raise InvalidBoundsError("lower bound exceeds upper bound")
        self._lo[start:stop] = lower
        self._hi[start:stop] = upper
        return self

    def copy(self) -> "LinearProgram":
        other = LinearProgram(self.senses, self.rhs, name=self.name)
        other._n = self._n
        other._A = self._A.copy()
        other._c = self._c.copy()
        other._lo = self._lo.copy()
        other._hi = self._hi.copy()
        return other

    # -----------------------------
    # Evaluation
    # -----------------------------
    def row_activity(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(x, dtype=float)

    def max_violation(self, x: np.ndarray) -> float:
        """Largest bound or row violation of x (0 when feasible)."""
        x = np.asarray(x, dtype=float)
        act = self.row_activity(x)
        worst = 0.0
        if self._n:
            worst = max(worst, float(np.max(self.lower - x, initial=0.0)), float(np.max(x - self.upper, initial=0.0)))
        for sense, a, b in zip(self.senses, act, self.rhs):
            if sense is RowSense.GE:
                worst = max(worst, b - a)
            elif sense is RowSense.LE:
                worst = max(worst, a - b)
            else:
                worst = max(worst, abs(a - b))
        return worst

    def dump(self, var_names: Optional[Sequence[str]] = None) -> str:
        """Plain-text rendering: ROWS, COLUMNS (nonzeros only), BOUNDS."""
        names = list(var_names) if var_names is not None else [f"x{j}" for j in range(self._n)]
        lines = [f"NAME {self.name}", "ROWS"]
        for r, (sense, b) in enumerate(zip(self.senses, self.rhs)):
            lines.append(f"  r{r} {sense.value} {b!r}")
        lines.append("COLUMNS")
        for j in range(self._n):
            entries = " ".join(f"r{r}:{self._A[r, j]!r}" for r in np.flatnonzero(self._A[:, j]))
            lines.append(f"  {names[j]} cost={self._c[j]!r} {entries}".rstrip())
        lines.append("BOUNDS")
        for j in range(self._n):
            lines.append(f"  {names[j]} [{self._lo[j]!r}, {self._hi[j]!r}]")
        lines.append("END")
        return "\n".join(lines) + "\n"


def add_column(lp: LinearProgram, cost: float, coeffs: Sequence[float], bounds: Tuple[float, float] = (0.0, INF)) -> LinearProgram:
    return lp.add_column(cost, coeffs, bounds)


def set_var_bounds(lp: LinearProgram, var: int, lo: float, hi: float) -> LinearProgram:
    return lp.set_var_bounds(var, lo, hi)
