"""Dense linear-algebra primitives.

Every matrix operation used by the higher modules goes through here so the
tolerances live in one place (:data:`TOL`).  The heavy lifting is delegated to
LAPACK through numpy/scipy: ``geev`` (Hessenberg reduction + shifted QR) for
eigenproblems, Padé scaling-and-squaring for the exponential, SVD for norms and
condition numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

import numpy as np
import scipy.linalg

from .exceptions import DimensionError, DomainError, NumericalError, SingularMatrixError

TOL = MappingProxyType(
    {
        "eig_residual": 1e-8,
        "solve_residual": 1e-9,
        "singular_cond": 1e12,
        "hermitian": 1e-10,
        "psd_floor": 0.0,
        "unit_eigenvalue": 1e-8,
    }
)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (with multiplicity) and optionally the matching eigenvectors.

    ``eigenvectors[:, i]`` pairs with ``eigenvalues[i]``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None

    @property
    def spectral_radius(self) -> float:
        if self.eigenvalues.size == 0:
            return 0.0
        return float(np.max(np.abs(self.eigenvalues)))


def _as_square(A, name="A"):
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"{name} must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError(f"{name} contains non-finite entries")
    return A


def eig(A, vectors: bool = True) -> Spectrum:
    """Full eigendecomposition of a dense square matrix.

    For real input the complex eigenvalues come out in conjugate pairs.  Each
    returned pair is checked against ``||A v - lambda v|| <= tol * ||A||``.
    """
    A = _as_square(A)
    if A.shape[0] == 0:
        return Spectrum(np.zeros(0, complex), np.zeros((0, 0), complex) if vectors else None)
    if not vectors:
        return Spectrum(np.linalg.eigvals(A).astype(complex))
    vals, vecs = np.linalg.eig(A)
    vals = vals.astype(complex)
    vecs = vecs.astype(complex)
    scale = max(np.linalg.norm(A, 2), np.finfo(float).tiny)
    res = np.linalg.norm(A @ vecs - vecs * vals, axis=0) / scale
    if res.max() > TOL["eig_residual"]:
        vecs = _refine_defective(A, vals, vecs, res > TOL["eig_residual"], scale)
        res = np.linalg.norm(A @ vecs - vecs * vals, axis=0) / scale
    if res.max() > TOL["eig_residual"]:
        raise NumericalError("eigensolver did not converge", float(res.max()))
    return Spectrum(vals, vecs)


def _refine_defective(A, vals, vecs, bad, scale):
    """Replace inaccurate eigenvectors by null vectors of ``A - lambda I``.

    Near a Jordan block LAPACK returns almost parallel vectors with residuals
    of order sqrt(eps).  The right singular vectors of ``A - lambda I`` for
    singular values below the residual tolerance span the true eigenspace;
    pairs sharing an eigenvalue take its basis vectors in turn (and repeat
    them when the eigenspace is smaller than the multiplicity).
    """
    vecs = vecs.copy()
    n = A.shape[0]
    used: dict[int, int] = {}
    for i in np.flatnonzero(bad):
        _, s, Vh = np.linalg.svd(A - vals[i] * np.eye(n))
        null = Vh[s <= TOL["eig_residual"] * scale].conj()
        if null.shape[0] == 0:
            null = Vh[-1:].conj()
        # index pairs by the first bad eigenvalue they coincide with
        key = next(j for j in np.flatnonzero(bad) if abs(vals[j] - vals[i]) <= 1e-6 * scale)
        k = used.get(key, 0)
        vecs[:, i] = null[k % null.shape[0]]
        used[key] = k + 1
    return vecs


def spectral_radius(A) -> float:
    """Largest eigenvalue modulus."""
    return eig(A, vectors=False).spectral_radius


def expm(A) -> np.ndarray:
    """Matrix exponential (Padé approximant with scaling and squaring)."""
    A = _as_square(A)
    return scipy.linalg.expm(A)


def spectral_norm(A) -> float:
    """Largest singular value."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def condition_number(A) -> float:
    A = _as_square(A)
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def solve(A, b) -> np.ndarray:
    """Solve ``A x = b``; raise :class:`SingularMatrixError` above the condition threshold."""
    A = _as_square(A)
    b = np.asarray(b)
    if b.shape[0] != A.shape[0]:
        raise DimensionError(f"rhs has {b.shape[0]} rows, matrix has {A.shape[0]}")
    cond = condition_number(A)
    if cond > TOL["singular_cond"]:
        raise SingularMatrixError(f"matrix is singular to working precision (cond={cond:.3e})")
    x = np.linalg.solve(A, b)
    lhs = np.linalg.norm(A @ x - b)
    rhs = TOL["solve_residual"] * (np.linalg.norm(A, 2) * np.linalg.norm(x) + np.linalg.norm(b))
    if lhs > rhs:
        raise NumericalError("linear solve residual above tolerance", float(lhs))
    return x


def is_hermitian(H, tol: float = TOL["hermitian"]) -> bool:
    H = np.asarray(H)
    return H.ndim == 2 and H.shape[0] == H.shape[1] and np.allclose(H, H.conj().T, rtol=0, atol=tol)


def psd_project(H) -> np.ndarray:
    """Nearest positive-semidefinite matrix in Frobenius norm (negative eigenvalues clipped)."""
    H = _as_square(H)
    if not is_hermitian(H):
        raise DomainError("psd_project requires a Hermitian matrix")
    H = 0.5 * (H + H.conj().T)
    vals, vecs = np.linalg.eigh(H)
    vals = np.clip(vals, TOL["psd_floor"], None)
    return (vecs * vals) @ vecs.conj().T
