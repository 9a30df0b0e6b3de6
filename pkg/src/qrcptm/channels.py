"""Channel and input-encoding constructors.

All encodings here are affine in a small feature vector of the input, e.g.
``(1, u, sqrt(1 - u**2))`` for an ``R_y(arccos u)`` rotation.  The
:class:`EncodingFamily` stores that expansion so long input sequences can be
driven without rebuilding a PTM per step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import numerics
from .exceptions import DomainError
from .pauli import (
    SIGMA,
    BlockPTM,
    KrausSet,
    embed,
    project_to_cptp,
    ptm_from_unitary,
    qubit_operator,
    random_unitary,
)

UNITARY = "unitary-encoding"
RESET = "reset-encoding"
GENERAL = "general"


def derive_seed(master_seed: int, *keys: int) -> int:
    """Stable 63-bit child seed of ``master_seed`` for the index tuple ``keys``."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


# --------------------------------------------------------------------------- damping / reset


def amplitude_damping_kraus(gamma: float) -> KrausSet:
    if not 0 <= gamma <= 1:
        raise DomainError(f"damping rate must lie in [0, 1], got {gamma}")
    K0 = np.array([[1, 0], [0, np.sqrt(1 - gamma)]], dtype=complex)
    K1 = np.array([[0, np.sqrt(gamma)], [0, 0]], dtype=complex)
    return KrausSet((K0, K1))


def amplitude_damping_ptm(gamma: float) -> BlockPTM:
    """Single-qubit amplitude damping toward ``|0>``; ``gamma = 1`` is a reset."""
    if not 0 <= gamma <= 1:
        raise DomainError(f"damping rate must lie in [0, 1], got {gamma}")
    s = np.sqrt(1 - gamma)
    return BlockPTM(1, [0.0, 0.0, gamma], np.diag([s, s, 1 - gamma]))


def reset_ptm(qubits: Sequence[int], n_qubits: int) -> BlockPTM:
    """Reset every qubit in ``qubits`` to ``|0>``."""
    out = BlockPTM.identity(n_qubits)
    for q in _check_qubit_set(qubits, n_qubits):
        out = embed(amplitude_damping_ptm(1.0), q, n_qubits) @ out
    return out


# --------------------------------------------------------------------------- rotations


def _check_input(u):
    arr = np.asarray(u, dtype=float)
    bad = ~(np.abs(arr) <= 1.0)
    if bad.any():
        raise DomainError(f"input {arr[bad].flat[0]} outside [-1, 1]")
    return arr


def _check_qubit_set(qubits, n_qubits) -> tuple[int, ...]:
    qubits = tuple(sorted(set(int(q) for q in qubits)))
    if not qubits:
        raise DomainError("input qubit set is empty")
    if qubits[0] < 1 or qubits[-1] > n_qubits:
        raise DomainError(f"input qubits {qubits} outside [1, {n_qubits}]")
    return qubits


def ry_unitary(theta: float) -> np.ndarray:
    return numerics.expm(-0.5j * theta * SIGMA[2])


def ry_arccos_rotation(u: float, target: int = 1, n_qubits: int = 1) -> BlockPTM:
    """PTM of ``exp(-i arccos(u) Y / 2)`` on ``target`` (1-based)."""
    u = float(_check_input(u))
    return embed(ptm_from_unitary(ry_unitary(np.arccos(u))), target, n_qubits)


def _ry_terms() -> np.ndarray:
    # PTM of R_y(theta) is exactly T0 + cos(theta) T1 + sin(theta) T2
    at = {th: ptm_from_unitary(ry_unitary(th)).matrix for th in (0.0, np.pi, np.pi / 2)}
    T0 = 0.5 * (at[0.0] + at[np.pi])
    T1 = 0.5 * (at[0.0] - at[np.pi])
    T2 = at[np.pi / 2] - T0
    return np.stack([T0, T1, T2])


def _arccos_features(u) -> np.ndarray:
    """Rows ``(1, u, sqrt(1 - u**2))`` for a 1-d array of inputs."""
    u = _check_input(u).reshape(-1)
    return np.column_stack([np.ones_like(u), u, np.sqrt(np.maximum(0.0, 1.0 - u * u))])


# --------------------------------------------------------------------------- encodings


@dataclass(frozen=True, eq=False)
class EncodingFamily:
    """A map ``u -> PTM`` over the input domain ``[-1, 1]``.

    The PTM is ``sum_k phi_k(u) * terms[k]`` (full ``4**N`` matrices) where
    ``features`` maps a 1-d array of inputs to the rows ``phi(u_t)``.
    For reset encodings ``reset`` holds the input-independent dissipative part
    and ``rotation`` the unitary family applied after it, so that
    ``family(u) == rotation(u) @ reset``.
    """

    n_qubits: int
    kind: str
    terms: np.ndarray
    features: Callable[[float], np.ndarray]
    input_qubits: tuple = ()
    reset: BlockPTM | None = None
    rotation: "EncodingFamily | None" = None
    input_dim: int = 1
    name: str = ""

    def __call__(self, u: float) -> BlockPTM:
        return BlockPTM.from_matrix(self.matrix(u))

    def matrix(self, u: float) -> np.ndarray:
        return np.tensordot(self.feature_matrix([u])[0], self.terms, axes=1)

    def feature_matrix(self, inputs) -> np.ndarray:
        u = _check_input(inputs).reshape(-1)
        return np.asarray(self.features(u), dtype=float).reshape(u.size, self.terms.shape[0])

    def unitary_part(self, u: float) -> BlockPTM:
        if self.kind == UNITARY:
            return self(u)
        if self.rotation is None:
            raise DomainError(f"{self.kind} encoding has no unitary part")
        return self.rotation(u)


def _expand_per_qubit(per_qubit: np.ndarray, qubits, n_qubits) -> tuple[np.ndarray, Callable]:
    """Tensor a single-qubit affine family onto several qubits.

    Returns the stacked terms and a feature map giving products of the
    single-qubit features, one per term.
    """
    eye = np.eye(4)
    K = per_qubit.shape[0]
    combos = list(itertools.product(range(K), repeat=len(qubits)))
    terms = []
    for combo in combos:
        M = np.ones((1, 1))
        pick = dict(zip(qubits, combo))
        for q in range(1, n_qubits + 1):
            M = np.kron(per_qubit[pick[q]] if q in pick else eye, M)
        terms.append(M)

    def features(u):
        f = _arccos_features(u)
        out = np.ones((f.shape[0], len(combos)))
        for c, combo in enumerate(combos):
            for k in combo:
                out[:, c] *= f[:, k]
        return out

    return np.stack(terms), features


def unitary_encoding_family(n_qubits: int, input_qubits: Sequence[int] = (1,)) -> EncodingFamily:
    """``R_y(arccos u)`` on every input qubit."""
    qubits = _check_qubit_set(input_qubits, n_qubits)
    terms, features = _expand_per_qubit(_ry_terms(), qubits, n_qubits)
    return EncodingFamily(n_qubits, UNITARY, terms, features, qubits, name="ry-arccos")


def reset_encoding_family(n_qubits: int, input_qubits: Sequence[int] = (1,)) -> EncodingFamily:
    """Reset each input qubit to ``|0>`` and then rotate it by ``R_y(arccos u)``."""
    qubits = _check_qubit_set(input_qubits, n_qubits)
    gamma = amplitude_damping_ptm(1.0).matrix
    per_qubit = np.einsum("kij,jl->kil", _ry_terms(), gamma)
    terms, features = _expand_per_qubit(per_qubit, qubits, n_qubits)
    return EncodingFamily(
        n_qubits,
        RESET,
        terms,
        features,
        qubits,
        reset=reset_ptm(qubits, n_qubits),
        rotation=unitary_encoding_family(n_qubits, qubits),
        name="reset-ry-arccos",
    )


def identity_encoding_family(n_qubits: int) -> EncodingFamily:
    """Input-independent identity; useful as a control."""
    D = 4**n_qubits
    return EncodingFamily(n_qubits, UNITARY, np.eye(D)[None], lambda u: np.ones((np.size(u), 1)), name="identity")


def local_reset_encoding(
    u: float,
    input_qubits: Sequence[int],
    n_qubits: int,
    rotation: Callable[..., BlockPTM] = ry_arccos_rotation,
) -> BlockPTM:
    """PTM of the local reset unitary input encoding for one input value."""
    qubits = _check_qubit_set(input_qubits, n_qubits)
    out = BlockPTM.identity(n_qubits)
    for q in qubits:
        step = rotation(u, q, n_qubits) @ embed(amplitude_damping_ptm(1.0), q, n_qubits)
        out = step @ out
    return out


# --------------------------------------------------------------------------- Hamiltonians


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    n_qubits: int
    H: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        H = np.array(self.H, dtype=complex)
        if H.shape != (2**self.n_qubits,) * 2:
            raise DomainError(f"Hamiltonian shape {H.shape} does not match {self.n_qubits} qubits")
        if not numerics.is_hermitian(H):
            raise DomainError("Hamiltonian is not Hermitian")
        H.setflags(write=False)
        object.__setattr__(self, "H", H)


def sk_hamiltonian(couplings, disorder, h: float = 1.0) -> np.ndarray:
    """``sum_{i>j} J_ij X_i X_j + 1/2 sum_i (h + D_i) Z_i``.

    ``couplings`` is an ``N x N`` array of which only the strict lower
    triangle is read.
    """
    D = np.asarray(disorder, dtype=float)
    J = np.asarray(couplings, dtype=float)
    n = D.size
    X = [qubit_operator(SIGMA[1], q, n) for q in range(1, n + 1)]
    Z = [qubit_operator(SIGMA[3], q, n) for q in range(1, n + 1)]
    H = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n):
        for j in range(i):
            H += J[i, j] * X[i] @ X[j]
        H += 0.5 * (h + D[i]) * Z[i]
    return H


def sample_sk_hamiltonian(n_qubits: int, J_s: float, disorder_K: float, h: float = 1.0, seed: int = 0) -> Hamiltonian:
    """Random SK Hamiltonian.

    ``J_ij ~ U[-J_s/2, J_s/2]`` and ``D_i ~ U[-K J_s/2, K J_s/2]``.
    """
    if J_s <= 0:
        raise DomainError(f"J_s must be positive, got {J_s}")
    if disorder_K < 0:
        raise DomainError(f"disorder strength must be non-negative, got {disorder_K}")
    rng = np.random.default_rng(seed)
    J = np.tril(rng.uniform(-J_s / 2, J_s / 2, size=(n_qubits, n_qubits)), k=-1)
    D = rng.uniform(-disorder_K * J_s / 2, disorder_K * J_s / 2, size=n_qubits)
    params = {
        "model": "sk",
        "J_s": float(J_s),
        "disorder_K": float(disorder_K),
        "h": float(h),
        "seed": int(seed),
        "couplings": J.tolist(),
        "disorder": D.tolist(),
    }
    return Hamiltonian(n_qubits, sk_hamiltonian(J, D, h), params)


def hamiltonian_step_ptm(ham: Hamiltonian, dt: float = 1.0) -> BlockPTM:
    """PTM of ``U = exp(-i H dt)``."""
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    return ptm_from_unitary(numerics.expm(-1j * dt * ham.H))


# --------------------------------------------------------------------------- random channels


def sample_random_cptp(n_qubits: int, seed: int = 0, max_iters: int = 200, tol: float = 1e-8) -> BlockPTM:
    """Uniform ``[-1, 1]`` matrix projected onto the CPTP set."""
    rng = np.random.default_rng(seed)
    D = 4**n_qubits
    return project_to_cptp(rng.uniform(-1, 1, size=(D, D)), max_iters=max_iters, tol=tol)


def random_unitary_ptm(n_qubits: int, seed=None) -> BlockPTM:
    return ptm_from_unitary(random_unitary(2**n_qubits, seed))


def random_kraus(n_qubits: int, n_ops: int, seed=None) -> KrausSet:
    """Random CPTP Kraus set (isometry slices of a Haar unitary)."""
    d = 2**n_qubits
    U = random_unitary(d * n_ops, seed)
    V = U[:, :d]
    return KrausSet(tuple(V[k * d : (k + 1) * d] for k in range(n_ops)))
