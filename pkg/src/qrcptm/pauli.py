"""Pauli bases, coherence vectors and Pauli transfer matrices.

Index convention
----------------
The Pauli string with index ``i`` is ``sigma_{k_1} (x) ... (x) sigma_{k_N}``
where ``k_l`` is the base-4 digit of ``i`` of weight ``4**(l-1)`` (least
significant digit addresses qubit 1).  Qubit 1 is the leftmost tensor factor
in the computational basis.

Normalisation
-------------
``O[i, j] = tr(P_i E(P_j)) / 2**N`` so that the identity channel has the
identity PTM and ``|E(rho)>> = O |rho>>`` holds with ``|rho>>_i = tr(P_i rho)``.
Choi matrices are stored as ``C = sum_ij O[i, j] P_j^T (x) P_i / 4**N``, which
has unit trace and is positive semidefinite exactly when the channel is
completely positive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import numerics
from .exceptions import DimensionError, DomainError, NumericalError

SIGMA = (
    np.array([[1, 0], [0, 1]], dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

NORMALIZATION_VERSION = "ptm-trace-over-2N/choi-unit-trace/v1"


def _check_qubits(n_qubits):
    if int(n_qubits) != n_qubits or n_qubits < 1:
        raise DomainError(f"n_qubits must be a positive integer, got {n_qubits}")
    return int(n_qubits)


def pauli_digits(index: int, n_qubits: int) -> tuple[int, ...]:
    """Per-qubit Pauli labels ``(k_1, ..., k_N)`` of a string index."""
    n_qubits = _check_qubits(n_qubits)
    if not 0 <= index < 4**n_qubits:
        raise DomainError(f"Pauli index {index} out of range for {n_qubits} qubits")
    return tuple((index >> (2 * l)) & 3 for l in range(n_qubits))


def pauli_index(digits: Sequence[int]) -> int:
    """Inverse of :func:`pauli_digits`."""
    return sum(int(k) << (2 * l) for l, k in enumerate(digits))


def pauli_string(index: int, n_qubits: int) -> np.ndarray:
    """The ``2**N x 2**N`` matrix of Pauli string ``index``."""
    out = np.ones((1, 1), dtype=complex)
    for k in pauli_digits(index, n_qubits):
        out = np.kron(out, SIGMA[k])
    return out


def qubit_operator(single: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Embed a single-qubit operator on ``qubit`` (1-based) of an ``n_qubits`` register."""
    if not 1 <= qubit <= n_qubits:
        raise DomainError(f"qubit {qubit} outside [1, {n_qubits}]")
    out = np.ones((1, 1), dtype=complex)
    for q in range(1, n_qubits + 1):
        out = np.kron(out, single if q == qubit else SIGMA[0])
    return out


class PauliBasis:
    """All ``4**N`` Pauli strings of an ``N``-qubit register, stacked.

    Instances are cached per ``N`` (see :func:`basis`) and read-only.
    """

    def __init__(self, n_qubits: int):
        self.n_qubits = _check_qubits(n_qubits)
        self.dim = 2**self.n_qubits
        self.size = 4**self.n_qubits
        mats = np.stack([pauli_string(i, self.n_qubits) for i in range(self.size)])
        mats.setflags(write=False)
        self.strings = mats

    def __len__(self):
        return self.size

    def __getitem__(self, i):
        return self.strings[i]

    def __repr__(self):
        return f"PauliBasis(n_qubits={self.n_qubits})"


@lru_cache(maxsize=None)
def basis(n_qubits: int) -> PauliBasis:
    return PauliBasis(n_qubits)


def n_qubits_from_dim(dim: int, base: int = 2) -> int:
    n = int(round(np.log(dim) / np.log(base))) if dim > 1 else 0
    if n < 1 or base**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of {base}")
    return n


# --------------------------------------------------------------------------- states


@dataclass(frozen=True)
class CoherenceState:
    """Coherence vector ``r`` with ``r_i = tr(P_{i+1} rho)``.

    The leading 1 of ``|rho>>`` is implicit.
    """

    n_qubits: int
    r: np.ndarray

    def __post_init__(self):
        r = np.array(self.r, dtype=float).reshape(-1)
        if r.size != 4**self.n_qubits - 1:
            raise DimensionError(f"coherence vector of {self.n_qubits} qubits needs {4**self.n_qubits - 1} entries, got {r.size}")
        if not np.all(np.isfinite(r)):
            raise DomainError("coherence vector has non-finite entries")
        r.setflags(write=False)
        object.__setattr__(self, "r", r)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.r))

    @property
    def ket(self) -> np.ndarray:
        """The full ``|rho>>`` vector including the leading 1."""
        return np.concatenate(([1.0], self.r))

    def to_density(self) -> np.ndarray:
        return coherence_to_density(self)

    def is_physical(self, tol: float = 1e-9) -> bool:
        rho = self.to_density()
        return float(np.linalg.eigvalsh(rho).min()) >= -tol


def max_coherence_norm(n_qubits: int) -> float:
    """Norm of every pure state, ``sqrt(2**N - 1)``."""
    return float(np.sqrt(2**n_qubits - 1))


def density_to_coherence(rho) -> CoherenceState:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrix must be square, got {rho.shape}")
    n = n_qubits_from_dim(rho.shape[0])
    if not numerics.is_hermitian(rho):
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > 1e-10:
        raise DomainError(f"density matrix trace is {np.trace(rho).real:.12g}, expected 1")
    P = basis(n).strings[1:]
    # tr(P rho) = sum_ab P_ab rho_ba
    r = np.einsum("kab,ba->k", P, rho).real
    return CoherenceState(n, r)


def coherence_to_density(state: CoherenceState) -> np.ndarray:
    B = basis(state.n_qubits)
    return np.einsum("k,kab->ab", state.ket, B.strings) / B.dim


def pure_state(psi) -> CoherenceState:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return density_to_coherence(np.outer(psi, psi.conj()))


def random_pure_state(n_qubits: int, rng) -> CoherenceState:
    """Haar-random pure state."""
    rng = np.random.default_rng(rng)
    d = 2**n_qubits
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    return pure_state(psi)


def random_density(n_qubits: int, rng, rank: int | None = None) -> np.ndarray:
    """Random mixed state from the Ginibre ensemble."""
    rng = np.random.default_rng(rng)
    d = 2**n_qubits
    rank = d if rank is None else rank
    G = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng) -> np.ndarray:
    """Haar-random unitary via QR with phase fix."""
    rng = np.random.default_rng(rng)
    Z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


# --------------------------------------------------------------------------- channels


@dataclass(frozen=True, eq=False)
class BlockPTM:
    """A Pauli transfer matrix held as its blocks ``(1, 0^T; b, W)``.

    ``b`` is the coherence influx.  The first row is trace preservation and is
    never stored.
    """

    n_qubits: int
    b: np.ndarray
    W: np.ndarray
    _spectrum: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        D = 4**self.n_qubits - 1
        b = np.array(self.b, dtype=float).reshape(-1)
        W = np.array(self.W, dtype=float)
        if b.shape != (D,) or W.shape != (D, D):
            raise DimensionError(f"PTM blocks for {self.n_qubits} qubits need b:{(D,)}, W:{(D, D)}; got {b.shape}, {W.shape}")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(W))):
            raise DomainError("PTM has non-finite entries")
        b.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "W", W)

    @classmethod
    def from_matrix(cls, M, strict: bool = False, tol: float = 1e-10) -> "BlockPTM":
        """Split a full ``4**N x 4**N`` matrix.

        The first row is discarded unless ``strict`` is set, in which case it
        must equal ``(1, 0, ..., 0)`` within ``tol``.
        """
        M = np.asarray(M)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionError(f"PTM must be square, got {M.shape}")
        if np.iscomplexobj(M):
            if np.abs(M.imag).max(initial=0.0) > 1e-9:
                raise DomainError("PTM entries must be real")
            M = M.real
        n = n_qubits_from_dim(M.shape[0], base=4)
        if strict and trace_preservation_residual(M) > tol:
            raise DomainError("first PTM row is not (1, 0, ..., 0)")
        return cls(n, M[1:, 0], M[1:, 1:])

    @classmethod
    def identity(cls, n_qubits: int) -> "BlockPTM":
        D = 4**n_qubits - 1
        return cls(n_qubits, np.zeros(D), np.eye(D))

    @property
    def dim(self) -> int:
        return self.b.size

    @property
    def matrix(self) -> np.ndarray:
        D = self.dim
        M = np.zeros((D + 1, D + 1))
        M[0, 0] = 1.0
        M[1:, 0] = self.b
        M[1:, 1:] = self.W
        return M

    def compose(self, first: "BlockPTM") -> "BlockPTM":
        """PTM of applying ``first`` and then ``self``."""
        if first.n_qubits != self.n_qubits:
            raise DimensionError("cannot compose PTMs of different register sizes")
        return BlockPTM(self.n_qubits, self.b + self.W @ first.b, self.W @ first.W)

    def __matmul__(self, other: "BlockPTM") -> "BlockPTM":
        return self.compose(other)

    def spectrum(self) -> numerics.Spectrum:
        """Cached eigendecomposition of ``W``."""
        if "eig" not in self._spectrum:
            self._spectrum["eig"] = numerics.eig(self.W)
        return self._spectrum["eig"]

    @property
    def spectral_radius(self) -> float:
        return self.spectrum().spectral_radius

    @property
    def spectral_norm(self) -> float:
        return numerics.spectral_norm(self.W)

    @property
    def influx_norm(self) -> float:
        return float(np.linalg.norm(self.b))

    def __repr__(self):
        return f"BlockPTM(n_qubits={self.n_qubits}, |b|={self.influx_norm:.4g})"


def trace_preservation_residual(M) -> float:
    M = np.asarray(M)
    row = M[0].astype(complex).copy()
    row[0] -= 1
    return float(np.abs(row).max())


def tensor(*ptms: BlockPTM) -> BlockPTM:
    """PTM of ``E_1 (x) E_2 (x) ...`` with ``ptms[0]`` acting on the first qubits."""
    M = np.ones((1, 1))
    n = 0
    for p in ptms:
        # higher qubits are more significant base-4 digits
        M = np.kron(p.matrix, M)
        n += p.n_qubits
    return BlockPTM.from_matrix(M)


def embed(ptm: BlockPTM, qubit: int, n_qubits: int) -> BlockPTM:
    """Embed a single-qubit PTM on ``qubit`` (1-based) with identity elsewhere."""
    if ptm.n_qubits != 1:
        raise DimensionError("embed expects a single-qubit PTM")
    if not 1 <= qubit <= n_qubits:
        raise DomainError(f"qubit {qubit} outside [1, {n_qubits}]")
    one = BlockPTM.identity(1)
    return tensor(*[ptm if q == qubit else one for q in range(1, n_qubits + 1)])


@dataclass(frozen=True)
class KrausSet:
    operators: tuple

    def __post_init__(self):
        ops = tuple(np.asarray(K, dtype=complex) for K in self.operators)
        if not ops:
            raise DomainError("a Kraus set needs at least one operator")
        d = ops[0].shape[0]
        if any(K.shape != (d, d) for K in ops):
            raise DimensionError("Kraus operators must share one square shape")
        object.__setattr__(self, "operators", ops)

    @property
    def n_qubits(self) -> int:
        return n_qubits_from_dim(self.operators[0].shape[0])

    def completeness_residual(self) -> float:
        S = sum(K.conj().T @ K for K in self.operators)
        return float(np.abs(S - np.eye(S.shape[0])).max())

    def apply(self, rho) -> np.ndarray:
        return sum(K @ rho @ K.conj().T for K in self.operators)


def _as_kraus(ks) -> KrausSet:
    if isinstance(ks, KrausSet):
        return ks
    if isinstance(ks, np.ndarray) and ks.ndim == 2:
        ks = [ks]
    return KrausSet(tuple(ks))


def ptm_from_kraus(ks, tol: float = 1e-10) -> BlockPTM:
    """PTM of the channel ``rho -> sum_k K rho K^dagger``."""
    ks = _as_kraus(ks)
    if ks.completeness_residual() > tol:
        raise DomainError(f"Kraus set is not trace preserving (residual {ks.completeness_residual():.2e})")
    B = basis(ks.n_qubits)
    K = np.stack(ks.operators)
    # E(P_j) for all j at once
    images = np.einsum("kab,jbc,kdc->jad", K, B.strings, K.conj(), optimize=True)
    M = np.einsum("iab,jba->ij", B.strings, images, optimize=True).real / B.dim
    return BlockPTM.from_matrix(M)


def ptm_from_unitary(U) -> BlockPTM:
    return ptm_from_kraus([np.asarray(U, dtype=complex)])


def apply_ptm(ptm: BlockPTM, state: CoherenceState) -> CoherenceState:
    if ptm.n_qubits != state.n_qubits:
        raise DimensionError(f"{ptm.n_qubits}-qubit PTM applied to {state.n_qubits}-qubit state")
    return CoherenceState(state.n_qubits, ptm.W @ state.r + ptm.b)


# --------------------------------------------------------------------------- Choi


def _full_matrix(ptm) -> np.ndarray:
    return ptm.matrix if isinstance(ptm, BlockPTM) else np.asarray(ptm, dtype=float)


def choi_from_ptm(ptm) -> np.ndarray:
    """Unit-trace Choi matrix; output system is the second tensor factor."""
    M = _full_matrix(ptm)
    n = n_qubits_from_dim(M.shape[0], base=4)
    P = basis(n).strings
    PT = np.transpose(P, (0, 2, 1))
    d = 2**n
    # sum_ij M_ij PT_j (x) P_i, assembled as a 4-index tensor
    C = np.einsum("ij,jab,icd->acbd", M, PT, P, optimize=True).reshape(d * d, d * d)
    return C / 4**n


def ptm_from_choi(C, strict: bool = False) -> BlockPTM:
    """Inverse of :func:`choi_from_ptm`."""
    return BlockPTM.from_matrix(_ptm_matrix_from_choi(C), strict=strict)


def _ptm_matrix_from_choi(C) -> np.ndarray:
    C = np.asarray(C, dtype=complex)
    n = n_qubits_from_dim(C.shape[0], base=4)
    d = 2**n
    P = basis(n).strings
    T = C.reshape(d, d, d, d)
    # tr(C (P_l^T (x) P_k)) = sum T[a,c,b,e] P_l[a,b] P_k[e,c]
    return np.einsum("acbe,lab,kec->kl", T, P, P, optimize=True).real


def choi_partial_trace_output(C) -> np.ndarray:
    C = np.asarray(C)
    d = int(round(np.sqrt(C.shape[0])))
    return np.einsum("acbc->ab", C.reshape(d, d, d, d))


# --------------------------------------------------------------------------- CPTP


@dataclass(frozen=True)
class CptpReport:
    trace_residual: float
    choi_min_eigenvalue: float
    spectral_radius: float
    influx_norm: float
    unital: bool
    tol: float

    @property
    def is_cptp(self) -> bool:
        return self.trace_residual <= self.tol and self.choi_min_eigenvalue >= -self.tol

    @property
    def trace_preserving(self) -> bool:
        return self.trace_residual <= self.tol


def validate_cptp(ptm, tol: float = 1e-7) -> CptpReport:
    """Diagnostics for a :class:`BlockPTM` or a raw ``4**N x 4**N`` matrix."""
    M = _full_matrix(ptm)
    W = M[1:, 1:]
    b = M[1:, 0]
    C = choi_from_ptm(M)
    C = 0.5 * (C + C.conj().T)
    return CptpReport(
        trace_residual=trace_preservation_residual(M),
        choi_min_eigenvalue=float(np.linalg.eigvalsh(C).min()),
        spectral_radius=numerics.spectral_radius(W),
        influx_norm=float(np.linalg.norm(b)),
        unital=bool(np.linalg.norm(b) < 1e-10),
        tol=tol,
    )


def project_to_cptp(M, max_iters: int = 200, tol: float = 1e-8) -> BlockPTM:
    """Map an arbitrary real matrix to a CPTP channel by alternating projections.

    Each sweep Hermitizes the Choi matrix, clips its negative eigenvalues and
    then restores the trace-preserving first row.  Once successive Choi
    iterates stop moving the remaining (tiny) negativity is removed by mixing
    in the completely depolarizing channel, which keeps trace preservation.
    """
    M = np.array(M, dtype=float)
    n = n_qubits_from_dim(M.shape[0], base=4)
    first_row = np.zeros(M.shape[0])
    first_row[0] = 1.0
    C_prev = choi_from_ptm(M)
    delta = np.inf
    for _ in range(max_iters):
        C = numerics.psd_project(0.5 * (C_prev + C_prev.conj().T))
        M = _ptm_matrix_from_choi(C)
        M[0] = first_row
        C = choi_from_ptm(M)
        delta = float(np.linalg.norm(C - C_prev))
        C_prev = C
        if delta < tol:
            break
    else:
        raise NumericalError(f"CPTP projection did not converge in {max_iters} iterations", delta)

    lam = float(np.linalg.eigvalsh(0.5 * (C_prev + C_prev.conj().T)).min())
    if lam < 0:
        floor = 1.0 / 4**n
        p = -lam / (floor - lam)
        M[1:] *= 1 - p
    return BlockPTM.from_matrix(M)
