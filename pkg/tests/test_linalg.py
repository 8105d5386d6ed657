import numpy as np
import pytest

from bifidelity.errors import (
    NoConvergence,
    NonFiniteInput,
    NotSquare,
    RankExceedsDims,
)
from bifidelity.linalg import (
    SingularSpectrum,
    lambda_max_symmetric,
    pivoted_qr,
    pseudo_inverse,
    singular_values,
    spectral_norm,
    svd,
)

from oracles import jacobi_eigvalsh, jacobi_svd_values, rank_by_svd


# --------------------------------------------------------------------------
# pivoted QR
# --------------------------------------------------------------------------

def test_pivoted_qr_identity():
    q, r, perm, rank = pivoted_qr(np.eye(3), rank=3)
    assert rank == 3
    assert np.allclose(q, np.eye(3))
    assert np.allclose(r, np.eye(3))
    assert list(perm) == [0, 1, 2]


def test_pivoted_qr_duplicated_column():
    a = np.array([[1.0], [2.0], [-0.5]])
    dup = np.hstack([a, a])
    _, _, _, rank = pivoted_qr(dup, tol=1e-12)
    assert rank == 1


def test_pivoted_qr_exact_rank_three():
    rng = np.random.default_rng(42)
    a = rng.standard_normal((8, 3)) @ rng.standard_normal((3, 12))
    norm = spectral_norm(a)
    q, r, perm, rank = pivoted_qr(a, tol=1e-10 * norm)
    assert rank == rank_by_svd(a) == 3
    p = np.eye(12)[:, perm]
    assert np.linalg.norm(a @ p - q @ r, 2) <= 1e-10 * norm


def test_pivoted_qr_orthonormality_and_residual():
    rng = np.random.default_rng(7)
    for trial in range(20):
        m, n = rng.integers(2, 30, size=2)
        a = rng.standard_normal((m, n))
        k = int(rng.integers(1, min(m, n) + 1))
        q, r, perm, rank = pivoted_qr(a, rank=k)
        assert rank == k
        assert np.max(np.abs(q.T @ q - np.eye(rank))) <= 1e-12 * n
        # triangularity of the leading block
        assert np.allclose(np.tril(r[:, :rank], -1), 0.0)


def test_pivoted_qr_tolerance_minimality():
    rng = np.random.default_rng(3)
    for trial in range(10):
        a = rng.standard_normal((6, 9))
        tol = 0.3 * spectral_norm(a)
        q, r, perm, rank = pivoted_qr(a, tol=tol)
        p = np.eye(9)[:, perm]
        assert np.linalg.norm(a @ p - q @ r, 2) <= tol
        if rank > 1:
            q1, r1, perm1, _ = pivoted_qr(a, rank=rank - 1)
            p1 = np.eye(9)[:, perm1]
            assert np.linalg.norm(a @ p1 - q1 @ r1, 2) > tol


def test_pivoted_qr_rejects_bad_rank():
    with pytest.raises(RankExceedsDims):
        pivoted_qr(np.eye(3), rank=4)


def test_pivoted_qr_rejects_nonfinite():
    bad = np.array([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(NonFiniteInput):
        pivoted_qr(bad, rank=1)


def test_pivoted_qr_deterministic():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((10, 14))
    first = pivoted_qr(a, rank=6)
    second = pivoted_qr(a, rank=6)
    assert np.array_equal(first[0], second[0])
    assert np.array_equal(first[1], second[1])
    assert np.array_equal(first[2], second[2])


# --------------------------------------------------------------------------
# SVD
# --------------------------------------------------------------------------

def test_svd_diagonal():
    _, s, _ = svd(np.diag([3.0, 2.0, 1.0]))
    assert np.allclose(s.values, [3.0, 2.0, 1.0])


def test_svd_rank_one_outer_product():
    u = np.array([2.0, 0.0, 0.0])
    v = np.array([0.0, 3.0])
    _, s, _ = svd(np.outer(u, v))
    assert abs(s.values[0] - 6.0) <= 1e-12
    assert np.all(s.values[1:] <= 1e-12)


def test_svd_matches_jacobi_oracle():
    rng = np.random.default_rng(19)
    a = rng.standard_normal((6, 6))
    _, s, _ = svd(a)
    oracle = jacobi_svd_values(a)
    assert np.max(np.abs(s.values - oracle)) <= 1e-10 * oracle[0]


def test_svd_reconstruction_and_orthogonality():
    rng = np.random.default_rng(23)
    a = rng.standard_normal((9, 5))
    u, s, v = svd(a)
    sigma1 = s.values[0]
    assert np.linalg.norm(a - (u * s.values) @ v.T, 2) <= 1e-12 * 9 * sigma1
    assert np.max(np.abs(u.T @ u - np.eye(5))) <= 1e-12
    assert np.max(np.abs(v.T @ v - np.eye(5))) <= 1e-12


# --------------------------------------------------------------------------
# lambda_max / spectral norm
# --------------------------------------------------------------------------

def test_lambda_max_negative_diagonal():
    assert lambda_max_symmetric(np.diag([-1.0, -5.0])) == pytest.approx(-1.0)


def test_lambda_max_known_eigenpair():
    assert lambda_max_symmetric(np.array([[2.0, 1.0], [1.0, 2.0]])) == pytest.approx(3.0)


def test_lambda_max_matches_jacobi_oracle():
    rng = np.random.default_rng(31)
    a = rng.standard_normal((10, 10))
    sym = 0.5 * (a + a.T)
    lam = lambda_max_symmetric(sym)
    oracle = jacobi_eigvalsh(sym)[-1]
    assert abs(lam - oracle) <= 1e-10 * max(abs(oracle), 1.0)


def test_lambda_max_rejects_rectangular():
    with pytest.raises(NotSquare):
        lambda_max_symmetric(np.ones((2, 3)))


def test_spectral_norm_zero_matrix():
    assert spectral_norm(np.zeros((4, 2))) == 0.0


def test_spectral_norm_diagonal():
    assert spectral_norm(np.diag([1.0, -4.0])) == pytest.approx(4.0)


def test_spectral_norm_equals_top_singular_value():
    rng = np.random.default_rng(37)
    a = rng.standard_normal((5, 7))
    _, s, _ = svd(a)
    assert spectral_norm(a) == pytest.approx(s.values[0], rel=1e-10)


def test_lambda_max_of_gramian_is_squared_norm():
    rng = np.random.default_rng(41)
    for trial in range(10):
        a = rng.standard_normal((6, 8))
        assert lambda_max_symmetric(a.T @ a) == pytest.approx(
            spectral_norm(a) ** 2, rel=1e-9
        )


# --------------------------------------------------------------------------
# pseudo-inverse
# --------------------------------------------------------------------------

def test_pseudo_inverse_diagonal_with_zero():
    p = pseudo_inverse(np.diag([2.0, 0.0]))
    assert np.allclose(p, np.diag([0.5, 0.0]))


def test_pseudo_inverse_orthogonal():
    rng = np.random.default_rng(43)
    q, _ = np.linalg.qr(rng.standard_normal((5, 5)))
    assert np.max(np.abs(pseudo_inverse(q) - q.T)) <= 1e-12


def test_pseudo_inverse_penrose_residuals():
    rng = np.random.default_rng(47)
    a = rng.standard_normal((4, 2)) @ rng.standard_normal((2, 4))
    p = pseudo_inverse(a)
    scale = np.linalg.norm(p, 2)
    assert np.linalg.norm(a @ p @ a - a, 2) <= 1e-9 * scale
    assert np.linalg.norm(p @ a @ p - p, 2) <= 1e-9 * scale
    assert np.max(np.abs((a @ p) - (a @ p).T)) <= 1e-9 * scale
    assert np.max(np.abs((p @ a) - (p @ a).T)) <= 1e-9 * scale


# --------------------------------------------------------------------------
# SingularSpectrum type
# --------------------------------------------------------------------------

def test_spectrum_validation():
    with pytest.raises(Exception):
        SingularSpectrum(np.array([1.0, 2.0]))  # increasing
    with pytest.raises(Exception):
        SingularSpectrum(np.array([1.0, -0.5]))  # negative


def test_spectrum_accessors():
    s = SingularSpectrum(np.array([4.0, 2.0, 1e-20]))
    assert s.sigma(1) == 4.0
    assert s.sigma(4) == 0.0
    assert s.numerical_rank() == 2
    assert len(s) == 3


def test_singular_values_helper_matches_svd():
    rng = np.random.default_rng(53)
    a = rng.standard_normal((7, 4))
    full = svd(a)[1].values
    quick = singular_values(a).values
    assert np.max(np.abs(full - quick)) <= 1e-13 * full[0]


def test_kernels_deterministic():
    rng = np.random.default_rng(59)
    a = rng.standard_normal((12, 9))
    assert np.array_equal(svd(a)[1].values, svd(a)[1].values)
    assert spectral_norm(a) == spectral_norm(a)
    sym = a[:9] + a[:9].T
    assert lambda_max_symmetric(sym) == lambda_max_symmetric(sym)
    assert np.array_equal(pseudo_inverse(a), pseudo_inverse(a))
