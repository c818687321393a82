"""Exact projection onto the boundary of the PSD cone along a direction.

Given X >= 0 (as a matrix inequality) and a symmetric D, project_psd
computes t* = max{t >= 0 : X + t D >= 0} together with the unit vector(s)
v certifying the first blocking constraint: v.T (X + t* D) v = 0 with
v.T D v strictly negative, so any step beyond t* violates the cut of v.

The dispatch depends on how D relates to the image of X:

* case A   -- X has full rank; reduce to I + t D' by a congruent transform.
* case B   -- X has rank c < n but D lies in its image; same reduction on
              the core block, hit vectors are zero-filled on non-core rows.
* case C1  -- D has a component outside the image but no coupling to it,
              and that outside block is PSD; only the image block can hit.
* case C2  -- as C1 with an indefinite outside block: t* = 0.
* case D   -- D couples the image to its complement.  Either the coupling
              makes every positive step infeasible with no single witness
              vector (D-tricky, t* = 0), or a tiny probe step resolves it:
              infeasible probe => t* = 0 with the negative eigenvector as
              an approximate hit (D1), feasible probe => recurse from the
              shifted matrix, which generically lands in case A/B (D2).

bisection_reference is an independent test oracle for t* that uses
nothing but smallest-eigenvalue feasibility tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import BadInput, CaseDUnresolved, IllConditioned, NotPsd
from .linalg import (
    LdlCoreFactor,
    QrActiveFactor,
    congruent_solve,
    ldl_core_factor,
    max_abs,
    min_eigenpairs,
    min_norm_solve,
    qr_active_factor,
    symmetrize,
)

# relative floor below which a reduced eigenvalue counts as nonnegative
_EIG_ZERO_REL = 1e-12


@dataclass(frozen=True)
class ProjectionTolerances:
    eps_core: float = 1e-10
    eps_img: float = 1e-8
    eps_qr: float = 1e-10
    eps_psd: float = 1e-9
    eps_hit: float = 1e-6
    eps_neg: float = 1e-8
    t1_list: tuple[float, ...] = (1e-6,)

    def __post_init__(self):
        for name in ("eps_core", "eps_img", "eps_qr", "eps_psd", "eps_hit", "eps_neg"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        ts = tuple(float(t) for t in self.t1_list)
        if not ts or any(t <= 0 for t in ts) or list(ts) != sorted(ts):
            raise ValueError("t1_list must be ascending and strictly positive")
        object.__setattr__(self, "t1_list", ts)


@dataclass(frozen=True)
class ProjectionOutcome:
    """Result of one projection: maximal step, witnesses, dispatch label."""

    t_star: float
    hit_vectors: list[np.ndarray]
    case_label: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.t_star)


def _unit(v: np.ndarray) -> np.ndarray:
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0:
        raise BadInput("zero hit vector")
    v = v / nrm
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


def _lift_core_vector(factor: LdlCoreFactor, u: np.ndarray) -> np.ndarray:
    """Solve K_cc.T w = u over the core rows, zero-fill the rest."""
    w = solve_triangular(factor.K_cc.T, u, lower=False)
    v = np.zeros(factor.n)
    v[factor.core_positions] = w
    return _unit(v)


def _hit_diagnostics(X, D, t_star, hits) -> dict:
    diag = {}
    if hits and math.isfinite(t_star):
        v = hits[0]
        diag["hit_residual"] = float(v @ (X + t_star * D) @ v)
        diag["hit_slope"] = float(v @ D @ v)
    return diag


def _reduced_outcome(
    factor: LdlCoreFactor,
    Dp: np.ndarray,
    label: str,
    second_hit: bool,
    X: np.ndarray,
    D: np.ndarray,
) -> ProjectionOutcome:
    """Projection of I_c + t D' once D is congruent to the core block."""
    c = Dp.shape[0]
    if c == 0:
        return ProjectionOutcome(math.inf, [], label, {"lambdas": []})
    pairs = min_eigenpairs(Dp, min(2, c))
    floor = _EIG_ZERO_REL * max(1.0, float(np.linalg.norm(Dp)))
    lam1 = pairs[0].value
    diag = {"lambdas": [p.value for p in pairs]}
    if lam1 >= -floor:
        return ProjectionOutcome(math.inf, [], label, diag)
    t_star = -1.0 / lam1
    hits = [_lift_core_vector(factor, pairs[0].vector)]
    if second_hit and len(pairs) > 1 and pairs[1].value < -floor:
        hits.append(_lift_core_vector(factor, pairs[1].vector))
    diag.update(_hit_diagnostics(X, D, t_star, hits))
    return ProjectionOutcome(t_star, hits, label, diag)


def _lifted_outcome(
    B_lift: np.ndarray,
    block: np.ndarray,
    pad_before: int,
    pad_after: int,
    t_star_of_lam,
    label: str,
    second_hit: bool,
    tol: ProjectionTolerances,
    X: np.ndarray,
    D: np.ndarray,
    neg_floor: float,
) -> ProjectionOutcome:
    """Shared tail of cases C1/C2: eigenpairs of one block, min-norm lift."""
    sz = block.shape[0]
    if sz == 0:
        return ProjectionOutcome(math.inf, [], label, {"lambdas": []})
    pairs = min_eigenpairs(block, min(2, sz))
    lam1 = pairs[0].value
    diag = {"lambdas": [p.value for p in pairs]}
    t_star = t_star_of_lam(lam1)
    if not math.isfinite(t_star):
        return ProjectionOutcome(math.inf, [], label, diag)
    hits = []
    for rank, pair in enumerate(pairs):
        if rank == 1 and not second_hit:
            break
        if pair.value >= -neg_floor:
            break
        reduced = np.concatenate([np.zeros(pad_before), pair.vector, np.zeros(pad_after)])
        hits.append(_unit(min_norm_solve(B_lift, reduced)))
    diag.update(_hit_diagnostics(X, D, t_star, hits))
    return ProjectionOutcome(t_star, hits, label, diag)


def project_psd(
    X,
    D,
    tol: ProjectionTolerances | None = None,
    second_hit: bool = True,
    _depth: int = 0,
) -> ProjectionOutcome:
    """Maximal step t* with X + t* D still PSD, plus first-hit vector(s).

    X must be PSD within tol.eps_psd relative to max(1, |X|_max), else
    BadInput.  t* is returned uncapped (math.inf when the whole ray stays
    inside the cone); callers are expected to cap it themselves.
    """
    tol = tol or ProjectionTolerances()
    X = symmetrize(X)
    D = symmetrize(D)
    if X.shape != D.shape:
        raise BadInput(f"shape mismatch: {X.shape} vs {D.shape}")
    xscale = max(1.0, max_abs(X))
    lam_x = min_eigenpairs(X, 1)[0].value
    if lam_x < -tol.eps_psd * xscale:
        raise BadInput(f"matrix is not PSD: smallest eigenvalue {lam_x:.3e}")

    factor = ldl_core_factor(X, tol.eps_core)
    c, n = factor.rank_c, factor.n
    Dp = congruent_solve(factor, D, tol.eps_img)
    if Dp is not None:
        return _reduced_outcome(factor, Dp, "A" if c == n else "B", second_hit, X, D)

    qr = qr_active_factor(factor, D, tol.eps_qr)
    if qr.m == 0:
        # the residual test was stricter than the QR rank test; D is in the
        # image after all and the recovered top block plays the role of D'
        return _reduced_outcome(factor, qr.F, "A" if c == n else "B", second_hit, X, D)

    dscale = max(1.0, max_abs(qr.D_blocks))
    B_lift = np.concatenate([factor.K_nc, qr.N], axis=1)
    if max_abs(qr.G) <= tol.eps_img * dscale:
        lam_e = min_eigenpairs(qr.E, 1)[0].value if qr.m else 0.0
        neg_floor = tol.eps_psd * dscale
        if lam_e >= -neg_floor:
            # C1: the outside block never blocks, project the image block
            floor = _EIG_ZERO_REL * max(1.0, float(np.linalg.norm(qr.F)) if c else 1.0)

            def t_of(lam, _floor=floor):
                return math.inf if lam >= -_floor else -1.0 / lam

            return _lifted_outcome(
                B_lift, qr.F, 0, qr.m, t_of, "C1", second_hit, tol, X, D, floor
            )
        # C2: the boundary is already pierced transversally
        return _lifted_outcome(
            B_lift, qr.E, c, 0, lambda lam: 0.0, "C2", second_hit, tol, X, D, neg_floor
        )

    if _depth >= 1:
        raise CaseDUnresolved(
            "nested projection did not reduce to a congruent case"
        )
    return project_case_d(X, D, qr, tol, second_hit=second_hit)


def project_case_d(
    X,
    D,
    factor: QrActiveFactor,
    tol: ProjectionTolerances | None = None,
    second_hit: bool = True,
) -> ProjectionOutcome:
    """Resolve a projection whose direction couples into the image of X.

    First screens for the no-witness pattern: a zero diagonal entry of the
    outside block with a nonzero coupling row makes every positive step
    infeasible, yet no single vector certifies it (D-tricky, t* = 0).
    Otherwise probes the separation points of tol.t1_list in order: an
    infeasible first probe gives t* = 0 with the negative eigenvector as an
    approximate hit (D1); a feasible probe shifts the base matrix and
    recurses, which is expected to land in a congruent case (D2,
    t* = probe + recursed step).  CaseDUnresolved when no probe works.
    """
    tol = tol or ProjectionTolerances()
    X = symmetrize(X)
    D = symmetrize(D)
    dscale = max(1.0, max_abs(factor.D_blocks))
    thr = tol.eps_img * dscale
    E, G = factor.E, factor.G
    for i in range(factor.m):
        if abs(E[i, i]) <= thr and max_abs(G[i, :]) > thr:
            return ProjectionOutcome(
                0.0, [], "D-tricky", {"tricky_row": i}
            )

    for idx, t1 in enumerate(tol.t1_list):
        shifted = symmetrize(X + t1 * D)
        lam, vec = min_eigenpairs(shifted, 1)[0]
        if lam < -tol.eps_psd * max(1.0, max_abs(shifted)):
            if idx == 0:
                diag = {"probe": t1, "probe_lambda": lam}
                diag.update(_hit_diagnostics(X, D, 0.0, [vec]))
                return ProjectionOutcome(0.0, [vec], "D1", diag)
            # an earlier probe was feasible but unresolved and this one is
            # already outside the cone: give up rather than guess
            raise CaseDUnresolved(
                f"separation point {t1:.3e} infeasible after unresolved smaller probes"
            )
        try:
            sub = project_psd(shifted, D, tol, second_hit=second_hit, _depth=1)
        except (CaseDUnresolved, BadInput, NotPsd, IllConditioned):
            # the probe sits too close to the cone boundary to factor
            continue
        if sub.case_label in ("A", "B"):
            diag = dict(sub.diagnostics)
            diag["probe"] = t1
            diag["sub_case"] = sub.case_label
            return ProjectionOutcome(
                t1 + sub.t_star, list(sub.hit_vectors), "D2", diag
            )
        # landed in case C: a larger probe may regularize better
    raise CaseDUnresolved("every separation point left the direction coupled")


def bisection_reference(X, D, t_cap: float = 1e9, eps: float = 1e-6) -> float:
    """Reference value of max{t : X + t D PSD} by doubling plus bisection.

    Uses only smallest-eigenvalue feasibility tests, independent of the
    factorization-based dispatch.  Returns math.inf when doubling up to
    t_cap never leaves the cone, otherwise a t within
    eps * max(1, t*) of the true step.
    """
    X = symmetrize(X)
    D = symmetrize(D)
    nx, nd = max_abs(X), max_abs(D)

    def feasible(t: float) -> bool:
        lam = float(np.linalg.eigvalsh(X + t * D)[0])
        return lam >= -1e-13 * max(1.0, nx + t * nd)

    lo = 0.0
    hi = None
    t = 1.0
    while t <= t_cap:
        if feasible(t):
            lo = t
            t *= 2.0
        else:
            hi = t
            break
    if hi is None:
        if feasible(t_cap):
            return math.inf
        hi = t_cap
    while hi - lo > 0.25 * eps * max(1.0, lo):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
