"""Dense revised simplex for the boxed row LP

    max  b.T y   s.t.   a_j.T y <= r_j  (rows),   |y_i| <= B.

The engine pivots on the equivalent program

    min  sum_j r_j g_j + B * sum_i (u_i + l_i)
    s.t. sum_j g_j a_j + u - l = b,      g, u, l >= 0,

whose basis has size k (the number of y variables) regardless of how many
rows have accumulated, and whose multipliers at optimality are exactly the
row-LP optimum y.  Appending a row to the row LP is appending a column
here, so a re-solve after a new cut starts from the previous basis and
typically needs a handful of pivots.  The box columns (+e_i, -e_i with
cost B) always admit the feasible starting basis diag(+-1), so no phase-1
is ever needed.

Pivot selection is most-negative reduced cost with a switch to smallest
index (anti-cycling) after a streak of degenerate steps; everything is
deterministic for identical input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

_TOL_RED = 1e-9  # reduced-cost optimality tolerance
_TOL_PIV = 1e-11  # smallest usable pivot magnitude
_DEGENERATE_STREAK = 30  # switch to smallest-index selection after this
_PIVOTS_PER_COLUMN = 60


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "stall"
    y: np.ndarray
    objective: float
    row_duals: np.ndarray
    pivots: int


class DenseSimplexBackend:
    """Bundled LP engine behind the subsolver port.

    Methods: load (constructor), add_row, set_objective, solve; solutions
    report the primal point, objective, per-row dual multipliers and
    status.  Rows are scaled by their max-abs coefficient on entry and the
    duals are unscaled on the way out.
    """

    def __init__(self, k: int, box_bound: float):
        if k < 1 or box_bound <= 0:
            raise ValueError("need k >= 1 and a positive box bound")
        self.k = k
        self.box = float(box_bound)
        cap = 2 * k + 16
        self._cols = np.zeros((k, cap))
        self._cost = np.zeros(cap)
        self._cols[:, :k] = np.eye(k)
        self._cols[:, k : 2 * k] = -np.eye(k)
        self._cost[: 2 * k] = self.box
        self._ncols = 2 * k
        self._row_scale: list[float] = []
        self._b: np.ndarray | None = None
        self._basis: np.ndarray | None = None

    @property
    def nrows(self) -> int:
        return len(self._row_scale)

    def _grow(self, extra: int):
        need = self._ncols + extra
        cap = self._cols.shape[1]
        if need <= cap:
            return
        new_cap = max(need, 2 * cap)
        cols = np.zeros((self.k, new_cap))
        cols[:, : self._ncols] = self._cols[:, : self._ncols]
        cost = np.zeros(new_cap)
        cost[: self._ncols] = self._cost[: self._ncols]
        self._cols, self._cost = cols, cost

    def add_row(self, coeffs, rhs: float):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (self.k,):
            raise DimensionMismatch(f"row has length {coeffs.size}, expected {self.k}")
        scale = max(float(np.max(np.abs(coeffs))), 1e-12)
        self._grow(1)
        self._cols[:, self._ncols] = coeffs / scale
        self._cost[self._ncols] = float(rhs) / scale
        self._ncols += 1
        self._row_scale.append(scale)

    def set_objective(self, b):
        b = np.asarray(b, dtype=float)
        if b.shape != (self.k,):
            raise DimensionMismatch(f"objective has length {b.size}, expected {self.k}")
        if self._b is not None and not np.array_equal(b, self._b):
            self._basis = None  # feasibility of the cached basis depended on b
        self._b = b.copy()

    def _fresh_basis(self) -> np.ndarray:
        # +e_i column when b_i >= 0 else -e_i: basis matrix diag(+-1),
        # basic values |b| >= 0, feasible by construction
        return np.where(self._b >= 0, np.arange(self.k), self.k + np.arange(self.k))

    def solve(self, max_pivots: int | None = None) -> LpSolution:
        if self._b is None:
            raise ValueError("objective not set")
        k, nc = self.k, self._ncols
        if self._basis is None:
            self._basis = self._fresh_basis()
        basis = self._basis
        cols = self._cols[:, :nc]
        cost = self._cost[:nc]
        if max_pivots is None:
            max_pivots = _PIVOTS_PER_COLUMN * (nc + k) + 10000

        Bmat = cols[:, basis].copy()
        try:
            gB = np.linalg.solve(Bmat, self._b)
        except np.linalg.LinAlgError:
            basis = self._fresh_basis()
            Bmat = cols[:, basis].copy()
            gB = np.linalg.solve(Bmat, self._b)
        if np.min(gB) < -1e-7:
            # cached basis no longer primal feasible here; restart clean
            basis = self._fresh_basis()
            Bmat = cols[:, basis].copy()
            gB = np.linalg.solve(Bmat, self._b)

        bland = False
        streak = 0
        pivots = 0
        resets = 0
        status = "stall"
        while pivots <= max_pivots:
            try:
                y = np.linalg.solve(Bmat.T, cost[basis])
            except np.linalg.LinAlgError:
                # a tiny ratio-test pivot can leave the basis numerically
                # singular; restart once from the always-feasible box basis
                if resets >= 1:
                    break
                resets += 1
                basis = self._fresh_basis()
                Bmat = cols[:, basis].copy()
                gB = np.linalg.solve(Bmat, self._b)
                bland = True
                continue
            red = cost - y @ cols
            red[basis] = 0.0
            if bland:
                cand = np.flatnonzero(red < -_TOL_RED)
                if cand.size == 0:
                    status = "optimal"
                    break
                enter = int(cand[0])
            else:
                enter = int(np.argmin(red))
                if red[enter] >= -_TOL_RED:
                    status = "optimal"
                    break
            d = np.linalg.solve(Bmat, cols[:, enter])
            pos = np.flatnonzero(d > _TOL_PIV)
            if pos.size == 0:
                status = "infeasible"  # dual of the row LP is unbounded
                break
            ratios = gB[pos] / d[pos]
            theta = float(np.min(ratios))
            tied = pos[np.flatnonzero(ratios <= theta + 1e-12)]
            if bland:
                leave = int(tied[np.argmin(basis[tied])])
            else:
                leave = int(tied[np.argmax(d[tied])])
            gB = gB - theta * d
            gB[leave] = theta
            gB = np.maximum(gB, 0.0)
            basis[leave] = enter
            Bmat[:, leave] = cols[:, enter]
            pivots += 1
            if theta <= 1e-12:
                streak += 1
                if streak >= _DEGENERATE_STREAK:
                    bland = True
            else:
                streak = 0
                bland = False
            if pivots % 64 == 0:
                gB = np.linalg.solve(Bmat, self._b)  # numerical hygiene

        self._basis = basis
        row_duals = np.zeros(self.nrows)
        try:
            y = np.linalg.solve(Bmat.T, cost[basis])
            gB = np.linalg.solve(Bmat, self._b)
        except np.linalg.LinAlgError:
            return LpSolution("stall", np.zeros(k), 0.0, row_duals, pivots)
        for pos_idx, col_idx in enumerate(basis):
            if col_idx >= 2 * k:
                j = col_idx - 2 * k
                row_duals[j] = gB[pos_idx] / self._row_scale[j]
        objective = float(self._b @ y)
        return LpSolution(
            status=status,
            y=y,
            objective=objective,
            row_duals=row_duals,
            pivots=pivots,
        )
