"""Outer LP approximation: box + linear rows + accumulated cuts.

solve_master maximizes b.T y over the current polytope and reports the
optimum together with dual multipliers per cut and per-variable box
activity.  The LP engine sits behind a small port (LpBackend) so an
external solver can be adapted without touching the driver; the bundled
default is the dense simplex in simplex.py.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from .errors import DimensionMismatch, MasterInfeasible, NumericalStall
from .model import LinearCut
from .simplex import DenseSimplexBackend, LpSolution

_DEDUP_TOL = 1e-9


class LpBackend(Protocol):
    """Minimal surface an LP engine must offer to drive the master."""

    def add_row(self, coeffs, rhs: float) -> None: ...

    def set_objective(self, b) -> None: ...

    def solve(self) -> LpSolution: ...


@dataclass
class OuterApprox:
    """Single-writer container for the growing outer polytope.

    purge_inactive (default off) drops cuts that came out of a solve both
    slack and with a zero multiplier; the engine is rebuilt on the next
    solve, trading the warm basis for a smaller LP.
    """

    k: int
    box_bound: float = 1e5
    linear_constraints: list[tuple[np.ndarray, float]] = field(default_factory=list)
    cuts: list[LinearCut] = field(default_factory=list)
    backend_factory: Callable[[int, float], LpBackend] = DenseSimplexBackend
    purge_inactive: bool = False
    _backend: LpBackend | None = field(default=None, repr=False)
    _canon: np.ndarray | None = field(default=None, repr=False)
    _n_canon: int = field(default=0, repr=False)

    def __post_init__(self):
        if self.box_bound <= 0:
            raise ValueError("box bound must be positive")
        for cut in list(self.cuts):
            self._store_canon(_canonical_row(cut.coeffs, cut.rhs))

    def _store_canon(self, row: np.ndarray):
        if self._canon is None or self._n_canon == self._canon.shape[0]:
            cap = 64 if self._canon is None else 2 * self._canon.shape[0]
            grown = np.zeros((cap, self.k + 1))
            if self._n_canon:
                grown[: self._n_canon] = self._canon[: self._n_canon]
            self._canon = grown
        self._canon[self._n_canon] = row
        self._n_canon += 1

    def _is_duplicate(self, row: np.ndarray) -> bool:
        if self._n_canon == 0:
            return False
        dist = np.max(np.abs(self._canon[: self._n_canon] - row), axis=1)
        return bool(np.min(dist) <= _DEDUP_TOL)


@dataclass(frozen=True)
class MasterSolution:
    y_out: np.ndarray
    objective: float
    cut_multipliers: np.ndarray
    linear_multipliers: np.ndarray
    box_flags: np.ndarray
    box_bound: float
    status: str  # "optimal" | "infeasible" | "stall"
    pivots: int


def _canonical_row(coeffs: np.ndarray, rhs: float) -> np.ndarray:
    row = np.concatenate([coeffs, [rhs]])
    peak = float(np.max(np.abs(row)))
    return row / peak if peak > 0 else row


def add_cut(approx: OuterApprox, cut: LinearCut) -> bool:
    """Append a cut unless it duplicates an existing one.

    Two cuts describing the same half-space after scaling to unit max-abs
    are duplicates (infinity distance below 1e-9); dropping them keeps the
    LP basis away from degenerate repeated rows.
    """
    if cut.k != approx.k:
        raise DimensionMismatch(f"cut has k={cut.k}, polytope has k={approx.k}")
    cand = _canonical_row(cut.coeffs, cut.rhs)
    if approx._is_duplicate(cand):
        return False
    approx.cuts.append(cut)
    approx._store_canon(cand)
    if approx._backend is not None:
        approx._backend.add_row(cut.coeffs, cut.rhs)
    return True


def _materialize(approx: OuterApprox) -> LpBackend:
    if approx._backend is None:
        backend = approx.backend_factory(approx.k, approx.box_bound)
        for a, ca in approx.linear_constraints:
            backend.add_row(a, ca)
        for cut in approx.cuts:
            backend.add_row(cut.coeffs, cut.rhs)
        approx._backend = backend
    return approx._backend


def solve_master(approx: OuterApprox, b) -> MasterSolution:
    """Maximize b.T y over box, linear rows and cuts.

    Re-solves warm from the previous basis when called repeatedly on the
    same polytope; deterministic given identical input.  Raises
    MasterInfeasible when the rows contradict each other (valid cuts never
    do, so this flags an upstream bug) and NumericalStall when the engine
    exhausts its pivot budget.
    """
    b = np.asarray(b, dtype=float)
    if b.shape != (approx.k,):
        raise DimensionMismatch(f"objective has length {b.size}, expected {approx.k}")
    backend = _materialize(approx)
    backend.set_objective(b)
    sol = backend.solve()
    if sol.status == "infeasible":
        raise MasterInfeasible("outer LP rows are contradictory")
    if sol.status != "optimal":
        raise NumericalStall(f"LP engine stopped with status {sol.status!r}")
    n_lin = len(approx.linear_constraints)
    box_flags = np.abs(sol.y) >= approx.box_bound * (1.0 - 1e-7)
    out = MasterSolution(
        y_out=sol.y,
        objective=sol.objective,
        cut_multipliers=sol.row_duals[n_lin:].copy(),
        linear_multipliers=sol.row_duals[:n_lin].copy(),
        box_flags=box_flags,
        box_bound=approx.box_bound,
        status=sol.status,
        pivots=sol.pivots,
    )
    if approx.purge_inactive:
        _purge(approx, out)
    return out


def _purge(approx: OuterApprox, sol: MasterSolution):
    """Drop cuts that are slack with a zero multiplier at the optimum."""
    keep = []
    for cut, gamma in zip(approx.cuts, sol.cut_multipliers):
        slack = cut.rhs - float(cut.coeffs @ sol.y_out)
        if gamma > 1e-9 or slack <= 1e-7 * max(1.0, abs(cut.rhs)):
            keep.append(cut)
    if len(keep) == len(approx.cuts):
        return
    approx.cuts = keep
    approx._backend = None
    approx._canon = None
    approx._n_canon = 0
    for cut in keep:
        approx._store_canon(_canonical_row(cut.coeffs, cut.rhs))


def box_active(sol: MasterSolution, tol: float = 1e-7) -> bool:
    """True when any variable sits within tol * B of the artificial box."""
    return bool(np.any(np.abs(sol.y_out) >= sol.box_bound * (1.0 - tol)))
