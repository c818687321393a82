"""Problem data model: instances, slack/direction assembly, cuts,
feasibility checks, and dual certificates.

An instance is the maximization of b.T y subject to the matrix constraint
sum_i y_i A_i <= C (as symmetric matrices) plus optional linear rows
a.T y <= c_a.  Every unit vector v induces the valid linear cut
sum_i (v.T A_i v) y_i <= v.T C v, which is how the cone constraint is
exposed to the LP master.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NegativeMultiplier
from .linalg import max_abs, min_eigenpairs, symmetrize

# coefficients above this magnitude get the whole cut rescaled
CUT_NORMALIZATION_CAP = 1e5


@dataclass
class SdpInstance:
    """Immutable problem data; matrices are stored exactly symmetric."""

    b: np.ndarray
    A: list[np.ndarray]
    C: np.ndarray
    linear_constraints: list[tuple[np.ndarray, float]] = field(default_factory=list)
    nonneg_y: bool = False

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float)
        if self.b.ndim != 1 or self.b.size < 1:
            raise DimensionMismatch("objective must be a nonempty vector")
        self.C = symmetrize(self.C)
        self.A = [symmetrize(a) for a in self.A]
        if len(self.A) != self.b.size:
            raise DimensionMismatch(
                f"{len(self.A)} constraint matrices for {self.b.size} variables"
            )
        n = self.C.shape[0]
        for i, a in enumerate(self.A):
            if a.shape != (n, n):
                raise DimensionMismatch(f"A[{i}] has shape {a.shape}, expected {(n, n)}")
        lcs = []
        for a, ca in self.linear_constraints:
            a = np.asarray(a, dtype=float)
            if a.shape != (self.b.size,):
                raise DimensionMismatch("linear constraint length mismatch")
            lcs.append((a, float(ca)))
        self.linear_constraints = lcs
        self._A_stack = np.stack(self.A) if self.A else np.zeros((0, n, n))

    @property
    def n(self) -> int:
        return self.C.shape[0]

    @property
    def k(self) -> int:
        return self.b.size

    def all_linear_constraints(self) -> list[tuple[np.ndarray, float]]:
        """Explicit linear rows plus the expansion of the nonneg_y flag."""
        rows = list(self.linear_constraints)
        if self.nonneg_y:
            for i in range(self.k):
                a = np.zeros(self.k)
                a[i] = -1.0
                rows.append((a, 0.0))
        return rows


@dataclass(frozen=True)
class LinearCut:
    """One LP row sum_i coeffs[i] y_i <= rhs generated by the vector origin.

    scale_applied records the positive factor the raw row was divided by
    (1.0 when no normalization fired), so dual multipliers can be mapped
    back onto origin @ origin.T exactly.
    """

    coeffs: np.ndarray
    rhs: float
    origin: np.ndarray
    scale_applied: float = 1.0

    @property
    def k(self) -> int:
        return self.coeffs.size


@dataclass(frozen=True)
class DualCertificate:
    """Z = sum_d gamma_d v_d v_d.T assembled from the master's multipliers.

    Z is PSD by construction; its objective C . Z matches the LP upper
    bound, and stationarity_residual records max_i |A_i . Z - b_i| which
    vanishes when neither box nor linear rows are active at the optimum.
    """

    Z: np.ndarray
    objective: float
    multipliers: dict[int, float]
    lambda_min: float
    stationarity_residual: float


def assemble_slack(inst: SdpInstance, y) -> np.ndarray:
    """Slack matrix C - sum_i y_i A_i (exact linear combination)."""
    y = np.asarray(y, dtype=float)
    return inst.C - np.tensordot(y, inst._A_stack, axes=(0, 0))


def assemble_direction(inst: SdpInstance, y_in, y_out) -> np.ndarray:
    """Direction -sum_i (y_out - y_in)_i A_i, so slack(y_in) + D = slack(y_out)."""
    d = np.asarray(y_out, dtype=float) - np.asarray(y_in, dtype=float)
    return -np.tensordot(d, inst._A_stack, axes=(0, 0))


def cut_from_vector(inst: SdpInstance, v) -> LinearCut:
    """The valid cut induced by v, normalized when coefficients get huge.

    When max(|coeffs|, |rhs|) exceeds CUT_NORMALIZATION_CAP the whole row
    is divided by that maximum; scaling by a positive number preserves the
    half-space, so validity is unaffected.
    """
    v = np.asarray(v, dtype=float)
    if float(np.linalg.norm(v)) == 0.0:
        raise ValueError("cut generator vector must be nonzero")
    coeffs = np.einsum("kij,i,j->k", inst._A_stack, v, v)
    rhs = float(v @ inst.C @ v)
    peak = max(max_abs(coeffs), abs(rhs))
    scale = peak if peak > CUT_NORMALIZATION_CAP else 1.0
    return LinearCut(
        coeffs=coeffs / scale, rhs=rhs / scale, origin=v.copy(), scale_applied=scale
    )


def verify_interior(inst: SdpInstance, y, eps: float = 1e-7) -> tuple[bool, float]:
    """Feasibility of y: slack PSD within eps * max(1, |C|_max) and every
    linear row satisfied within eps.  Returns (feasible, lambda_min)."""
    y = np.asarray(y, dtype=float)
    lam = min_eigenpairs(assemble_slack(inst, y), 1)[0].value
    ok = lam >= -eps * max(1.0, max_abs(inst.C))
    for a, ca in inst.all_linear_constraints():
        if float(a @ y) - ca > eps * max(1.0, abs(ca)):
            ok = False
            break
    return ok, lam


def linear_ratio_test(inst: SdpInstance, y_in, d) -> float:
    """Largest t >= 0 keeping y_in + t d inside every linear row;
    math.inf when no row limits the ray.

    Directions whose row product is only rounding noise relative to the
    row and step scales do not count as blocking: treating them as such
    would pin the step at zero whenever an iterate sits on a row boundary
    to machine precision.
    """
    y_in = np.asarray(y_in, dtype=float)
    d = np.asarray(d, dtype=float)
    t_best = np.inf
    for a, ca in inst.all_linear_constraints():
        den = float(a @ d)
        if den <= 1e-11 * max(1.0, max_abs(a) * max_abs(d)):
            continue
        slack = max(ca - float(a @ y_in), 0.0)
        t_best = min(t_best, slack / den)
    return float(t_best)


def build_dual_certificate(
    inst: SdpInstance, cuts: list[LinearCut], multipliers
) -> DualCertificate:
    """Assemble Z from cut origins and the master's dual multipliers.

    Multipliers are given per normalized LP row, so each is divided by the
    cut's scale_applied before weighting origin @ origin.T; that makes
    A_i . Z reproduce the LP stationarity sum exactly.
    """
    multipliers = np.asarray(multipliers, dtype=float)
    if multipliers.size != len(cuts):
        raise DimensionMismatch(
            f"{multipliers.size} multipliers for {len(cuts)} cuts"
        )
    n = inst.n
    Z = np.zeros((n, n))
    recorded: dict[int, float] = {}
    for idx, (cut, gamma) in enumerate(zip(cuts, multipliers)):
        if gamma < -1e-9:
            raise NegativeMultiplier(f"multiplier {gamma:.3e} on cut {idx}")
        gamma = max(float(gamma), 0.0)
        recorded[idx] = gamma
        if gamma > 0.0:
            w = gamma / cut.scale_applied
            Z += w * np.outer(cut.origin, cut.origin)
    Z = symmetrize(Z)
    objective = float(np.sum(inst.C * Z))
    lam = min_eigenpairs(Z, 1)[0].value if n else 0.0
    stat = max_abs(
        np.einsum("kij,ij->k", inst._A_stack, Z) - inst.b
    )
    return DualCertificate(
        Z=Z,
        objective=objective,
        multipliers=recorded,
        lambda_min=lam,
        stationarity_residual=stat,
    )
