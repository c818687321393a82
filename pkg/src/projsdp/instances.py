"""Random instance families for testing and benchmarking.

Instances are built spectrally: a pool of shared candidate null vectors is
drawn once, each matrix adopts every shared vector independently with a
fixed probability (plus a set of always-included fixed null vectors), the
adopted set is completed to a random orthonormal basis, and the remaining
eigenvalues are drawn uniformly from the matrix's declared range.  Because
several matrices annihilate the same vectors, the slack matrix is
rank-deficient on a common subspace, which is what makes these problems
non-trivial for cone projection.

Randomness comes from counter-based bit generators with one documented
stream per consumer (stream 0: shared pool, stream 1+i: matrix i with C
last, stream k+2: objective), so a seed pins the instance down exactly
for a fixed NumPy build.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadParams, DegenerateBase
from .model import SdpInstance

_ORTHO_TOL = 1e-10


@dataclass(frozen=True)
class GenParams:
    n: int
    k: int
    seed: int = 0
    shared_null_count: int | None = None  # defaults to k // 2
    insert_prob: float = 0.8
    eig_range_A: tuple[float, float] = (9.0, 10.0)
    eig_range_C: tuple[float, float] = (30.0, 50.0)
    b_mode: str = "ones"  # "ones" | "uniform"
    nonneg_y: bool = False
    fixed_null_count: int = 0

    def resolved_shared(self) -> int:
        return self.k // 2 if self.shared_null_count is None else self.shared_null_count

    def validate(self):
        if self.n < 1 or self.k < 1:
            raise BadParams("need n >= 1 and k >= 1")
        if not 0.0 <= self.insert_prob <= 1.0:
            raise BadParams("insert_prob must lie in [0, 1]")
        if self.resolved_shared() + self.fixed_null_count > self.n:
            raise BadParams("null vector count exceeds the matrix order")
        if self.b_mode not in ("ones", "uniform"):
            raise BadParams(f"unknown b_mode {self.b_mode!r}")
        for lo, hi in (self.eig_range_A, self.eig_range_C):
            if not (np.isfinite(lo) and np.isfinite(hi) and lo <= hi):
                raise BadParams("eigenvalue ranges must be finite with lo <= hi")


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(index))


def random_orthonormal_completion(base, seed, n: int | None = None) -> np.ndarray:
    """Extend orthonormal vectors to a full random orthonormal basis.

    base is a sequence of length-n vectors (possibly empty, in which case
    n must be passed); seed is an integer or a Generator.  The first
    len(base) output columns equal the base; the rest are random
    directions orthogonalized against everything before them.  Raises
    DegenerateBase when the base is not orthonormal within 1e-10.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    base = [np.asarray(v, dtype=float) for v in base]
    if base:
        n = base[0].size
        Bm = np.stack(base, axis=1)
        gram = Bm.T @ Bm
        if np.max(np.abs(gram - np.eye(len(base)))) > _ORTHO_TOL:
            raise DegenerateBase("base vectors are not orthonormal to 1e-10")
    elif n is None:
        raise ValueError("an empty base needs the dimension n")
    vecs = list(base)
    while len(vecs) < n:
        for _ in range(64):
            cand = rng.standard_normal(n)
            for existing in vecs:
                cand -= (existing @ cand) * existing
            for existing in vecs:  # second pass tightens orthogonality
                cand -= (existing @ cand) * existing
            nrm = float(np.linalg.norm(cand))
            if nrm > 1e-8:
                vecs.append(cand / nrm)
                break
        else:
            raise DegenerateBase("could not extend the base to a full basis")
    return np.stack(vecs, axis=1)


def _random_basis(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """count orthonormal random vectors in R^n (Gram-Schmidt on normals)."""
    if count == 0:
        return np.zeros((n, 0))
    vecs: list[np.ndarray] = []
    while len(vecs) < count:
        cand = rng.standard_normal(n)
        for existing in vecs:
            cand -= (existing @ cand) * existing
        for existing in vecs:
            cand -= (existing @ cand) * existing
        nrm = float(np.linalg.norm(cand))
        if nrm > 1e-8:
            vecs.append(cand / nrm)
    return np.stack(vecs, axis=1)


def _spectral_matrix(
    rng: np.random.Generator,
    null_vectors: np.ndarray,
    n: int,
    eig_range: tuple[float, float],
) -> np.ndarray:
    n0 = null_vectors.shape[1]
    basis = random_orthonormal_completion(list(null_vectors.T), rng, n=n)
    eigs = np.zeros(n)
    eigs[n0:] = rng.uniform(eig_range[0], eig_range[1], size=n - n0)
    M = basis @ (eigs[:, None] * basis.T)
    return (M + M.T) * 0.5


def generate_instance(p: GenParams) -> SdpInstance:
    """Build one instance; deterministic per (params, seed).

    The nonneg_y flag is expanded eagerly into explicit rows -y_i <= 0 so
    that serialized instances round-trip field-exactly.
    """
    p.validate()
    shared = p.resolved_shared()
    pool_rng = _stream(p.seed, 0)
    pool = _random_basis(pool_rng, p.n, shared + p.fixed_null_count)
    shared_pool = pool[:, :shared]
    fixed_pool = pool[:, shared:]

    matrices = []
    for midx in range(p.k + 1):
        rng = _stream(p.seed, 1 + midx)
        take = rng.random(shared) < p.insert_prob
        nulls = np.concatenate([shared_pool[:, take], fixed_pool], axis=1)
        eig_range = p.eig_range_A if midx < p.k else p.eig_range_C
        matrices.append(_spectral_matrix(rng, nulls, p.n, eig_range))
    A, C = matrices[: p.k], matrices[p.k]

    b_rng = _stream(p.seed, p.k + 2)
    if p.b_mode == "ones":
        b = np.ones(p.k)
    else:
        b = b_rng.uniform(0.0, 1.0, size=p.k)

    linear: list[tuple[np.ndarray, float]] = []
    if p.nonneg_y:
        for i in range(p.k):
            a = np.zeros(p.k)
            a[i] = -1.0
            linear.append((a, 0.0))
    return SdpInstance(b=b, A=A, C=C, linear_constraints=linear, nonneg_y=False)
