"""Dense symmetric kernels behind the cone projection.

Provides a rank-revealing LDL factorization with core-position detection,
smallest eigenpairs, the congruent solve used to reduce a direction onto the
image of a PSD matrix, a QR factorization with active-column detection, and
a minimum-norm solve for underdetermined lifts.

All routines take plain float ndarrays, never mutate their arguments, and
are pure functions of their inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ConvergenceFailure, IllConditioned, NotPsd, RankDeficient

DEFAULT_EPS_CORE = 1e-10
DEFAULT_EPS_IMG = 1e-8
DEFAULT_EPS_QR = 1e-10
DEFAULT_EPS_EIG = 1e-10


def symmetrize(a) -> np.ndarray:
    """Exactly symmetric copy of a square matrix.

    Float addition commutes bitwise, so (a + a.T)/2 satisfies
    out[i, j] == out[j, i] exactly, not just within rounding.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return (a + a.T) * 0.5


def max_abs(a) -> float:
    """Entrywise infinity norm; 0.0 for empty arrays."""
    a = np.asarray(a, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0


def _fix_sign(v: np.ndarray) -> np.ndarray:
    """Canonical eigenvector sign: largest-magnitude entry positive."""
    i = int(np.argmax(np.abs(v)))
    return -v if v[i] < 0 else v


class EigenPair(NamedTuple):
    value: float
    vector: np.ndarray


@dataclass(frozen=True)
class LdlCoreFactor:
    """Factorization X = K_nc @ K_nc.T of a PSD matrix of rank c.

    K_nc holds the core columns of the unit lower-triangular factor scaled
    by the square roots of their pivots; rows restricted to the core
    positions (K_cc) form a lower-triangular matrix with positive diagonal.
    raw_L and raw_p keep the full unit lower-triangular factor and pivot
    vector, with non-core columns reset to unit vectors and zero pivots.
    """

    n: int
    rank_c: int
    core_positions: np.ndarray
    K_nc: np.ndarray
    raw_L: np.ndarray
    raw_p: np.ndarray

    @property
    def K_cc(self) -> np.ndarray:
        return self.K_nc[self.core_positions, :]


def ldl_core_factor(X, eps_core: float = DEFAULT_EPS_CORE) -> LdlCoreFactor:
    """LDL factorization with detection of core (independent) positions.

    Works in natural order without permutations.  A pivot whose remaining
    contribution stays below eps_core * max(1, |X|_max) marks a non-core
    position: its pivot is dropped to exactly zero and its column of L is
    left as the unit vector.  Raises NotPsd when a pivot falls materially
    below zero, i.e. X is indefinite beyond both eps_core and what rounding
    can explain.

    Natural order means a legitimately tiny kept pivot can amplify the
    input's own storage rounding by the squared size of its multiplier
    column; trailing pivots are only determined up to that noise, so the
    zero/negative classification widens accordingly.
    """
    X = symmetrize(X)
    n = X.shape[0]
    scale = max(1.0, max_abs(X))
    thresh = eps_core * scale
    eps_mach = float(np.finfo(float).eps)

    L = np.eye(n)
    p = np.zeros(n)
    S = X.copy()
    core: list[int] = []
    amp = 1.0  # squared magnitude of the largest multiplier column so far
    for j in range(n):
        piv = S[j, j]
        noise = 16.0 * n * eps_mach * scale * amp
        tol_j = max(thresh, noise)
        if piv < -tol_j:
            raise NotPsd(f"pivot {piv:.3e} at position {j} below -{tol_j:.3e}")
        if piv <= tol_j:
            # dependent position: contribution is negligible by the PSD
            # structure of the Schur complement
            continue
        core.append(j)
        p[j] = piv
        if j + 1 < n:
            col = S[j + 1 :, j].copy()
            l = col / piv
            L[j + 1 :, j] = l
            S[j + 1 :, j + 1 :] -= np.outer(l, col)
            if l.size:
                amp = max(amp, float(np.max(np.abs(l))) ** 2)
    core_idx = np.array(core, dtype=int)
    K_nc = L[:, core_idx] * np.sqrt(p[core_idx])
    return LdlCoreFactor(
        n=n,
        rank_c=len(core),
        core_positions=core_idx,
        K_nc=K_nc,
        raw_L=L,
        raw_p=p,
    )


def min_eigenpairs(S, count: int, eps_eig: float = DEFAULT_EPS_EIG) -> list[EigenPair]:
    """The `count` smallest eigenvalues of a symmetric matrix, ascending,
    each with a unit eigenvector of canonical sign.

    Backed by a full dense symmetric eigendecomposition.  Raises
    ConvergenceFailure if the decomposition fails or a residual
    |S v - lam v| exceeds eps_eig * |S|_F.
    """
    S = symmetrize(S)
    n = S.shape[0]
    if not 1 <= count <= n:
        raise ValueError(f"count must lie in [1, {n}], got {count}")
    try:
        w, V = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"symmetric eigensolver failed: {exc}") from exc
    fro = float(np.linalg.norm(S))
    pairs = []
    for i in range(count):
        vec = _fix_sign(V[:, i].copy())
        resid = float(np.linalg.norm(S @ vec - w[i] * vec))
        if resid > eps_eig * max(fro, 1e-300):
            raise ConvergenceFailure(
                f"eigenpair residual {resid:.3e} exceeds {eps_eig:.1e} * |S|_F"
            )
        pairs.append(EigenPair(float(w[i]), vec))
    return pairs


def congruent_solve(
    factor: LdlCoreFactor, D, eps_img: float = DEFAULT_EPS_IMG
) -> np.ndarray | None:
    """Solve D = K_nc @ D' @ K_nc.T over the core block.

    Two triangular back-substitutions on the square core system give the
    candidate D'; it is returned only when the full-size residual
    |D - K_nc D' K_nc.T|_max stays within eps_img * max(1, |D|_max).
    Otherwise D does not lie in the image of X and the result is None.
    """
    D = symmetrize(D)
    c = factor.rank_c
    if c == 0:
        Dp = np.zeros((0, 0))
    else:
        core = factor.core_positions
        Kcc = factor.K_cc
        Dcc = D[np.ix_(core, core)]
        Y = solve_triangular(Kcc, Dcc, lower=True)
        Dp = symmetrize(solve_triangular(Kcc, Y.T, lower=True).T)
    resid = D - factor.K_nc @ Dp @ factor.K_nc.T
    if max_abs(resid) > eps_img * max(1.0, max_abs(D)):
        return None
    return Dp


@dataclass(frozen=True)
class QrActiveFactor:
    """Joint decomposition of a direction D against the image of K_nc.

    N holds m orthonormal columns spanning the part of D outside the image
    of K_nc (N.T @ K_nc == 0 by construction); D reconstructs as
    [K_nc N] @ D_blocks @ [K_nc N].T with D_blocks partitioned into the
    image block F (c x c), the coupling block G (m x c), and the
    outside block E (m x m).  m == 0 means D was in the image after all.
    """

    c: int
    m: int
    N: np.ndarray
    D_blocks: np.ndarray
    active_columns: np.ndarray

    @property
    def F(self) -> np.ndarray:
        return self.D_blocks[: self.c, : self.c]

    @property
    def G(self) -> np.ndarray:
        return self.D_blocks[self.c :, : self.c]

    @property
    def E(self) -> np.ndarray:
        return self.D_blocks[self.c :, self.c :]


def qr_active_factor(
    factor: LdlCoreFactor, D, eps_qr: float = DEFAULT_EPS_QR
) -> QrActiveFactor:
    """QR of [K_nc D] with detection of the active columns of D.

    A row of the triangular factor beyond the first c that vanishes means
    the matching orthogonal column contributes nothing to the product, so
    that column of D depends on earlier columns.  The surviving (active)
    columns give N; the blocks of D over [K_nc N] are then recovered
    through the Gram system, which is block diagonal because N is
    orthonormal and orthogonal to K_nc.
    """
    D = symmetrize(D)
    n, c = factor.n, factor.rank_c
    K = factor.K_nc
    M = np.concatenate([K, D], axis=1)
    Q, R = np.linalg.qr(M, mode="reduced")  # Q: n x n, R: n x (c + n)
    kscale = max(1.0, max_abs(K))
    for j in range(c):
        if abs(R[j, j]) <= eps_qr * kscale:
            raise IllConditioned(
                f"triangular diagonal {R[j, j]:.3e} at {j}: core factor lost rank"
            )
    mscale = max(1.0, max_abs(M))
    active_rows = [
        r for r in range(c, n) if max_abs(R[r, :]) > eps_qr * mscale
    ]
    m = len(active_rows)
    N = Q[:, active_rows]
    # active column of D = first column where the active row pivots
    act_cols = []
    for r in active_rows:
        nz = np.flatnonzero(np.abs(R[r, :]) > eps_qr * mscale)
        act_cols.append(int(nz[0]) - c)
    B = np.concatenate([K, N], axis=1)
    mid = B.T @ D @ B
    if c > 0:
        Rcc = R[:c, :c]
        # (Rcc.T Rcc)^{-1} applied from the left on the first c rows,
        # then from the right on the first c columns
        mid[:c, :] = solve_triangular(
            Rcc, solve_triangular(Rcc.T, mid[:c, :], lower=True), lower=False
        )
        mid[:, :c] = solve_triangular(
            Rcc, solve_triangular(Rcc.T, mid[:, :c].T, lower=True), lower=False
        ).T
    D_blocks = symmetrize(mid)
    return QrActiveFactor(
        c=c, m=m, N=N, D_blocks=D_blocks, active_columns=np.array(act_cols, dtype=int)
    )


def min_norm_solve(B, rhs) -> np.ndarray:
    """Minimum-2-norm solution v of the underdetermined system B.T v = rhs.

    B must be n x r with full column rank r <= n; the minimum-norm choice
    makes the lift canonical and reproducible.  Raises RankDeficient when
    the numerical rank falls short of r.
    """
    B = np.asarray(B, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    n, r = B.shape
    if r > n:
        raise RankDeficient(f"system has {r} equations in {n} unknowns")
    if r == 0:
        return np.zeros(n)
    sol, _, rank, _ = np.linalg.lstsq(B.T, rhs, rcond=None)
    if rank < r:
        raise RankDeficient(f"numerical rank {rank} < {r}")
    return sol
