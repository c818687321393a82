import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from projsdp.errors import IllConditioned, NotPsd, RankDeficient
from projsdp.linalg import (
    congruent_solve,
    ldl_core_factor,
    max_abs,
    min_eigenpairs,
    min_norm_solve,
    qr_active_factor,
    symmetrize,
)

from projection_cases import make_psd


def random_psd(rng, n, rank):
    return make_psd(rng, n, rank)[0]


class TestLdlCoreFactor:
    def test_rank_one_diagonal(self):
        f = ldl_core_factor(np.diag([4.0, 0.0]))
        assert f.rank_c == 1
        assert list(f.core_positions) == [0]
        np.testing.assert_allclose(f.K_nc.ravel(), [2.0, 0.0])

    def test_identity(self):
        f = ldl_core_factor(np.eye(3))
        assert f.rank_c == 3
        np.testing.assert_allclose(f.K_nc, np.eye(3))

    def test_rank_one_outer(self):
        f = ldl_core_factor(np.ones((2, 2)))
        assert f.rank_c == 1
        np.testing.assert_allclose(f.K_nc.ravel(), [1.0, 1.0])
        np.testing.assert_allclose(f.raw_L, [[1.0, 0.0], [1.0, 1.0]])
        np.testing.assert_allclose(f.raw_p, [1.0, 0.0])

    def test_core_block_triangular_positive(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            n = int(rng.integers(1, 13))
            X = random_psd(rng, n, int(rng.integers(1, n + 1)))
            f = ldl_core_factor(X)
            Kcc = f.K_cc
            assert np.all(np.diag(Kcc) > 0)
            assert max_abs(np.triu(Kcc, 1)) == 0.0

    def test_reconstruction_and_rank_thousand(self):
        # construction rank must be recovered and X - K K^T must stay tiny
        rng = np.random.default_rng(1234)
        worst = 0.0
        for _ in range(1000):
            n = int(rng.integers(1, 13))
            rank = int(rng.integers(1, n + 1))
            X = random_psd(rng, n, rank)
            f = ldl_core_factor(X)
            assert f.rank_c == rank
            resid = max_abs(X - f.K_nc @ f.K_nc.T) / max(1.0, max_abs(X))
            worst = max(worst, resid)
        assert worst <= 1e-9

    def test_not_psd_raises(self):
        with pytest.raises(NotPsd):
            ldl_core_factor(np.diag([1.0, -1.0]))

    def test_full_rank_core_is_everything(self):
        f = ldl_core_factor(np.diag([2.0, 3.0, 4.0]))
        assert list(f.core_positions) == [0, 1, 2]


class TestMinEigenpairs:
    def test_diagonal(self):
        pairs = min_eigenpairs(np.diag([3.0, -2.0]), 1)
        assert pairs[0].value == pytest.approx(-2.0)
        np.testing.assert_allclose(np.abs(pairs[0].vector), [0.0, 1.0], atol=1e-14)

    def test_two_by_two_closed_form(self):
        pairs = min_eigenpairs(np.array([[0.0, 1.0], [1.0, 0.0]]), 2)
        assert pairs[0].value == pytest.approx(-1.0)
        assert pairs[1].value == pytest.approx(1.0)
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(np.abs(pairs[0].vector), [s, s], atol=1e-14)

    def test_matches_characteristic_polynomial_roots(self):
        # oracle: Faddeev-LeVerrier coefficients + companion-matrix roots
        rng = np.random.default_rng(42)
        S = symmetrize(rng.normal(size=(6, 6)))
        n = 6
        coeffs = np.zeros(n + 1)
        coeffs[0] = 1.0
        M = np.zeros((n, n))
        for m in range(1, n + 1):
            M = S @ M + coeffs[m - 1] * np.eye(n)
            coeffs[m] = -np.trace(S @ M) / m
        roots = np.sort(np.real(np.roots(coeffs)))
        pairs = min_eigenpairs(S, n)
        got = np.array([p.value for p in pairs])
        np.testing.assert_allclose(got, roots, atol=1e-9)

    def test_residual_contract(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            n = int(rng.integers(1, 10))
            S = symmetrize(rng.normal(size=(n, n)))
            for lam, v in min_eigenpairs(S, n):
                assert np.linalg.norm(S @ v - lam * v) <= 1e-10 * max(
                    np.linalg.norm(S), 1e-300
                )
                assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_count_validation(self):
        with pytest.raises(ValueError):
            min_eigenpairs(np.eye(2), 3)


class TestCongruentSolve:
    def test_identity_factor(self):
        f = ldl_core_factor(np.eye(2))
        D = np.array([[1.0, 2.0], [2.0, 5.0]])
        np.testing.assert_allclose(congruent_solve(f, D), D)

    def test_diagonal_scaling(self):
        f = ldl_core_factor(np.diag([4.0, 1.0]))
        np.testing.assert_allclose(congruent_solve(f, np.diag([4.0, 1.0])), np.eye(2))

    def test_image_mismatch_is_none(self):
        f = ldl_core_factor(np.diag([1.0, 0.0]))
        assert congruent_solve(f, np.diag([0.0, -1.0])) is None

    def test_in_image_round_trip(self):
        rng = np.random.default_rng(9)
        for _ in range(40):
            n = int(rng.integers(2, 9))
            rank = int(rng.integers(1, n + 1))
            X = random_psd(rng, n, rank)
            S = symmetrize(rng.normal(size=(n, n)))
            D = symmetrize(X @ S @ X)
            f = ldl_core_factor(X)
            Dp = congruent_solve(f, D)
            assert Dp is not None
            resid = max_abs(D - f.K_nc @ Dp @ f.K_nc.T)
            assert resid <= 1e-8 * max(1.0, max_abs(D))


class TestQrActiveFactor:
    def test_outside_diag_direction(self):
        f = ldl_core_factor(np.diag([1.0, 0.0]))
        qr = qr_active_factor(f, np.diag([0.0, -1.0]))
        assert qr.m == 1
        np.testing.assert_allclose(np.abs(qr.N.ravel()), [0.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(qr.F, [[0.0]], atol=1e-14)
        np.testing.assert_allclose(qr.G, [[0.0]], atol=1e-14)
        np.testing.assert_allclose(qr.E, [[-1.0]], atol=1e-14)

    def test_coupled_direction(self):
        f = ldl_core_factor(np.diag([1.0, 0.0]))
        qr = qr_active_factor(f, np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert qr.m == 1
        np.testing.assert_allclose(qr.F, [[0.0]], atol=1e-14)
        np.testing.assert_allclose(np.abs(qr.G), [[1.0]], atol=1e-14)
        np.testing.assert_allclose(qr.E, [[0.0]], atol=1e-14)

    def test_full_rank_core_gives_m_zero(self):
        f = ldl_core_factor(np.eye(2))
        qr = qr_active_factor(f, np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert qr.m == 0

    def test_invariants_on_seeded_inputs(self):
        rng = np.random.default_rng(17)
        for _ in range(60):
            n = int(rng.integers(2, 10))
            rank = int(rng.integers(1, n))
            X = random_psd(rng, n, rank)
            D = symmetrize(rng.normal(size=(n, n)))
            f = ldl_core_factor(X)
            qr = qr_active_factor(f, D)
            B = np.concatenate([f.K_nc, qr.N], axis=1)
            if qr.m:
                np.testing.assert_allclose(
                    qr.N.T @ qr.N, np.eye(qr.m), atol=1e-10
                )
                assert max_abs(qr.N.T @ f.K_nc) <= 1e-10 * max(1.0, max_abs(f.K_nc))
            resid = max_abs(D - B @ qr.D_blocks @ B.T)
            assert resid <= 1e-8 * max(1.0, max_abs(D))

    def test_ill_conditioned_detected(self):
        f = ldl_core_factor(np.diag([1.0, 0.0]))
        broken = ldl_core_factor(np.eye(2))
        # forge a factor whose core columns are linearly dependent
        forged = type(f)(
            n=2,
            rank_c=2,
            core_positions=np.array([0, 1]),
            K_nc=np.array([[1.0, 0.0], [1.0, 0.0]]),
            raw_L=broken.raw_L,
            raw_p=broken.raw_p,
        )
        with pytest.raises(IllConditioned):
            qr_active_factor(forged, np.eye(2))


class TestMinNormSolve:
    def test_square_identity(self):
        np.testing.assert_allclose(
            min_norm_solve(np.eye(2), np.array([3.0, 4.0])), [3.0, 4.0]
        )

    def test_fills_zeros(self):
        np.testing.assert_allclose(
            min_norm_solve(np.array([[1.0], [0.0]]), np.array([5.0])), [5.0, 0.0]
        )

    def test_minimum_norm_beats_random_solutions(self):
        from scipy.linalg import null_space

        rng = np.random.default_rng(77)
        B = rng.normal(size=(6, 3))
        rhs = rng.normal(size=3)
        v = min_norm_solve(B, rhs)
        assert max_abs(B.T @ v - rhs) <= 1e-10
        N = null_space(B.T)
        for _ in range(100):
            other = v + N @ rng.normal(size=N.shape[1])
            assert np.linalg.norm(v) <= np.linalg.norm(other) + 1e-12

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            min_norm_solve(np.array([[1.0, 1.0], [0.0, 0.0]]), np.array([1.0, 1.0]))


class TestCongruentExpansion:
    def test_psd_status_preserved_under_full_rank_expansion(self):
        # status agreement with the tolerance scaled by the squared spectrum of M
        rng = np.random.default_rng(21)
        violations = 0
        for _ in range(200):
            n = int(rng.integers(2, 9))
            n2 = n + int(rng.integers(0, 4))
            if rng.integers(2):
                X = random_psd(rng, n, int(rng.integers(1, n + 1)))
            else:
                V, _ = np.linalg.qr(rng.normal(size=(n, n)))
                eigs = rng.uniform(0.1, 2.0, size=n)
                eigs[0] = -rng.uniform(0.1, 2.0)
                X = symmetrize(V @ (eigs[:, None] * V.T))
            U1, _ = np.linalg.qr(rng.normal(size=(n2, n2)))
            U2, _ = np.linalg.qr(rng.normal(size=(n, n)))
            sig = rng.uniform(0.5, 2.0, size=n)
            M = U1[:, :n] @ (sig[:, None] * U2.T)
            Xp = symmetrize(M @ X @ M.T)
            tol = 1e-9 * max(1.0, max_abs(X))
            tol_scaled = tol * float(np.max(sig)) ** 2
            psd_x = min_eigenpairs(X, 1)[0].value >= -tol
            psd_xp = min_eigenpairs(Xp, 1)[0].value >= -tol_scaled
            violations += psd_x != psd_xp
        assert violations == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=8), st.integers(min_value=0, max_value=2**31))
def test_symmetrize_exact(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    S = symmetrize(A)
    assert np.array_equal(S, S.T)
