import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrcptm import numerics
from qrcptm.exceptions import DimensionError, DomainError, SingularMatrixError


def faddeev_leverrier(A):
    """Characteristic polynomial coefficients, highest degree first."""
    n = A.shape[0]
    coeffs = [1.0]
    M = np.zeros_like(A)
    for k in range(1, n + 1):
        M = A @ M + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(A @ M) / k)
    return np.array(coeffs)


def taylor_expm(A, terms=60):
    out = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


def test_eig_identity():
    sp = numerics.eig(np.eye(3))
    np.testing.assert_allclose(sp.eigenvalues, [1, 1, 1])


def test_eig_planar_rotation():
    vals = numerics.eig(np.array([[0.0, 1.0], [-1.0, 0.0]])).eigenvalues
    np.testing.assert_allclose(sorted(vals, key=lambda z: z.imag), [-1j, 1j], atol=1e-14)


def test_eig_matches_characteristic_polynomial_roots():
    rng = np.random.default_rng(7)
    B = rng.normal(size=(8, 8))
    A = B + B.T
    roots = np.sort(np.roots(faddeev_leverrier(A)).real)
    vals = np.sort(numerics.eig(A).eigenvalues.real)
    np.testing.assert_allclose(vals, roots, atol=1e-8)


def test_eig_real_input_gives_conjugate_pairs():
    rng = np.random.default_rng(1)
    vals = numerics.eig(rng.normal(size=(9, 9)), vectors=False).eigenvalues
    np.testing.assert_allclose(np.sort_complex(vals), np.sort_complex(vals.conj()), atol=1e-12)


def test_eig_residuals_on_defective_matrix():
    # a Jordan block hidden by a similarity transform
    rng = np.random.default_rng(3)
    J = np.diag([0.5, 0.5, 0.2]) + np.diag([1.0, 0.0], 1)
    S = rng.normal(size=(3, 3))
    A = S @ J @ np.linalg.inv(S)
    sp = numerics.eig(A)
    res = np.linalg.norm(A @ sp.eigenvectors - sp.eigenvectors * sp.eigenvalues, axis=0)
    assert res.max() <= 1e-8 * np.linalg.norm(A, 2)


def test_eig_rejects_non_square():
    with pytest.raises(DimensionError):
        numerics.eig(np.zeros((2, 3)))


def test_expm_zero_and_diagonal():
    np.testing.assert_allclose(numerics.expm(np.zeros((3, 3))), np.eye(3))
    np.testing.assert_allclose(numerics.expm(np.diag([np.log(2), np.log(3)])), np.diag([2.0, 3.0]), rtol=1e-14)


def test_expm_matches_taylor_series():
    Y = np.array([[0, -1j], [1j, 0]])
    A = -1j * (np.pi / 2) * Y
    np.testing.assert_allclose(numerics.expm(A), taylor_expm(A), atol=1e-12)


def test_expm_relative_accuracy_moderate_norm():
    rng = np.random.default_rng(2)
    A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    A *= 3.0 / np.linalg.norm(A, 2)
    ref = taylor_expm(A, terms=80)
    assert np.linalg.norm(numerics.expm(A) - ref) <= 1e-10 * np.linalg.norm(ref)


def test_eigenvalues_of_expm_are_exponentials():
    rng = np.random.default_rng(4)
    A = rng.normal(size=(5, 5)) * 0.5
    lam = numerics.eig(A).eigenvalues
    mu = numerics.eig(numerics.expm(A)).eigenvalues
    np.testing.assert_allclose(np.sort_complex(np.exp(lam)), np.sort_complex(mu), atol=1e-8)


def test_spectral_norm_examples():
    assert numerics.spectral_norm(np.eye(4)) == pytest.approx(1.0)
    assert numerics.spectral_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0)


def test_spectral_norm_matches_gram_eigenvalue():
    rng = np.random.default_rng(5)
    A = rng.normal(size=(15, 15))
    gram = numerics.eig(A.T @ A).eigenvalues.real.max()
    assert numerics.spectral_norm(A) == pytest.approx(np.sqrt(gram), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 9))
def test_spectral_norm_orthogonal_invariance(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    assert numerics.spectral_norm(Q @ A) == pytest.approx(numerics.spectral_norm(A), rel=1e-10)


def test_solve_examples():
    b = np.array([1.0, -2.0, 3.0])
    np.testing.assert_allclose(numerics.solve(np.eye(3), b), b)
    np.testing.assert_allclose(numerics.solve(np.diag([2.0, 4.0]), np.array([2.0, 4.0])), [1.0, 1.0])


def test_solve_residual_and_round_trip():
    rng = np.random.default_rng(6)
    A = rng.normal(size=(15, 15)) + 5 * np.eye(15)
    b = rng.normal(size=15)
    x = numerics.solve(A, b)
    assert np.linalg.norm(A @ x - b) <= 1e-9 * (np.linalg.norm(A, 2) * np.linalg.norm(x) + np.linalg.norm(b))
    np.testing.assert_allclose(numerics.solve(A, A @ x), x, rtol=1e-9)


def test_solve_singular():
    with pytest.raises(SingularMatrixError):
        numerics.solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.ones(2))


def test_psd_project_examples():
    rng = np.random.default_rng(8)
    G = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    P = G @ G.conj().T
    np.testing.assert_allclose(numerics.psd_project(P), P, atol=1e-10)
    np.testing.assert_allclose(numerics.psd_project(np.diag([1.0, -1.0])), np.diag([1.0, 0.0]), atol=1e-15)


def test_psd_project_is_nearest():
    rng = np.random.default_rng(9)
    G = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    H = G + G.conj().T
    P = numerics.psd_project(H)
    assert np.linalg.eigvalsh(P).min() >= -1e-10
    d0 = np.linalg.norm(H - P)
    for _ in range(200):
        E = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        Q = numerics.psd_project(P + 0.1 * (E + E.conj().T))
        assert np.linalg.norm(H - Q) >= d0 - 1e-12


def test_psd_project_rejects_non_hermitian():
    with pytest.raises(DomainError):
        numerics.psd_project(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_tolerances_are_read_only():
    with pytest.raises(TypeError):
        numerics.TOL["eig_residual"] = 1.0
