"""Input-driven coherence-vector dynamics and echo-state diagnostics.

A :class:`ReservoirSystem` pairs a fixed channel (``dynamics``) with an
input encoding.  One time step applies the encoding for the current input and
then the dynamics, so on the full ``|rho>>`` vector

    x_{t+1} = D E(u_t) x_t.

Because every encoding is affine in a feature vector of ``u`` the step matrix
is ``sum_k phi_k(u) D T_k``; those products are precomputed once and the time
loop runs in a compiled kernel.

For reset encodings the block description ``(b, W)`` with a
unitary input rotation ``R(u)`` is recovered by moving the input-independent
reset to the end of the step (:meth:`ReservoirSystem.reference_ptm`).  The
two descriptions differ only by where the period starts, so spectral radii
of the driven linear parts agree.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

from . import numerics
from .channels import RESET, UNITARY, EncodingFamily, hamiltonian_step_ptm, reset_encoding_family, sample_sk_hamiltonian
from .exceptions import DimensionError, DomainError, SingularMatrixError
from .pauli import BlockPTM, CoherenceState, validate_cptp

DEGENERATE_VARIANCE = 1e-14
ENCODE_FIRST = "encode-first"
DYNAMICS_FIRST = "dynamics-first"


# --------------------------------------------------------------------------- kernels


@numba.njit(cache=True)
def _evolve_kernel(terms, feats, x0):
    T = feats.shape[0]
    K, D, _ = terms.shape
    out = np.empty((T + 1, D))
    out[0] = x0
    x = x0.copy()
    y = np.empty(D)
    for t in range(T):
        y[:] = 0.0
        for k in range(K):
            f = feats[t, k]
            if f == 0.0:
                continue
            for i in range(D):
                acc = 0.0
                for j in range(D):
                    acc += terms[k, i, j] * x[j]
                y[i] += f * acc
        out[t + 1] = y
        x[:] = y
    return out


@numba.njit(cache=True)
def _difference_kernel(terms, feats, d0):
    """Log-norms of ``d_t = L(u_{t-1}) ... L(u_0) d0`` with per-step renormalisation."""
    T = feats.shape[0]
    K, D, _ = terms.shape
    lognorm = np.empty(T + 1)
    n0 = np.sqrt(np.sum(d0 * d0))
    lognorm[0] = np.log(n0)
    d = d0 / n0
    y = np.empty(D)
    for t in range(T):
        y[:] = 0.0
        for k in range(K):
            f = feats[t, k]
            if f == 0.0:
                continue
            for i in range(D):
                acc = 0.0
                for j in range(D):
                    acc += terms[k, i, j] * d[j]
                y[i] += f * acc
        n = np.sqrt(np.sum(y * y))
        if n == 0.0:
            lognorm[t + 1 :] = -np.inf
            break
        lognorm[t + 1] = lognorm[t] + np.log(n)
        d = y / n
    return lognorm


# --------------------------------------------------------------------------- system


@dataclass(frozen=True, eq=False)
class ReservoirSystem:
    """Fixed channel plus input encoding.

    Parameters
    ----------
    dynamics : BlockPTM
        The input-independent channel.
    encoding : EncodingFamily
        Input encoding; must act on the same register.
    order : {"encode-first", "dynamics-first"}
        Whether a step is ``D E(u)`` (default) or ``E(u) D``.
    validate : bool
        Check that ``dynamics`` is CPTP and that its unit eigenvectors are
        orthogonal to its influx.
    """

    dynamics: BlockPTM
    encoding: EncodingFamily
    order: str = ENCODE_FIRST
    validate: bool = True
    metadata: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.dynamics.n_qubits != self.encoding.n_qubits:
            raise DimensionError(
                f"dynamics acts on {self.dynamics.n_qubits} qubits, encoding on {self.encoding.n_qubits}"
            )
        if self.order not in (ENCODE_FIRST, DYNAMICS_FIRST):
            raise DomainError(f"unknown step order {self.order!r}")
        if self.validate:
            report = validate_cptp(self.dynamics)
            if not report.is_cptp:
                raise DomainError(
                    f"dynamics is not CPTP (trace residual {report.trace_residual:.2e}, "
                    f"Choi min eigenvalue {report.choi_min_eigenvalue:.2e})"
                )
            overlap = unit_eigenvector_overlap(self.dynamics)
            if overlap > 1e-7:
                raise DomainError(f"unit eigenvectors of W overlap the influx by {overlap:.2e}")
        D = self.dynamics.matrix
        T = self.encoding.terms
        step_terms = np.einsum("ij,kjl->kil", D, T) if self.order == ENCODE_FIRST else np.einsum("kij,jl->kil", T, D)
        step_terms = np.ascontiguousarray(step_terms)
        self._cache["terms"] = step_terms
        self._cache["linear_terms"] = np.ascontiguousarray(step_terms[:, 1:, 1:])

    @property
    def n_qubits(self) -> int:
        return self.dynamics.n_qubits

    @property
    def dim(self) -> int:
        return self.dynamics.dim

    def features(self, inputs) -> np.ndarray:
        return self.encoding.feature_matrix(inputs)

    def step_matrix(self, u: float) -> np.ndarray:
        """Full ``4**N x 4**N`` matrix of one step at input ``u``."""
        return np.tensordot(self.features([u])[0], self._cache["terms"], axes=1)

    def step_ptm(self, u: float) -> BlockPTM:
        return BlockPTM.from_matrix(self.step_matrix(u))

    def linear_part(self, u: float) -> np.ndarray:
        """``L(u)``: the block acting on the coherence vector."""
        return self.step_matrix(u)[1:, 1:]

    def influx(self, u: float) -> np.ndarray:
        """``c(u)``: the constant part of one step."""
        return self.step_matrix(u)[1:, 0]

    def reference_ptm(self) -> BlockPTM:
        """Input-independent channel in ``(b, W)`` form with a unitary input rotation.

        Unitary encodings give ``dynamics`` itself.  Reset encodings give
        ``reset o dynamics``: the step sequence ``reset, R(u), dynamics`` is
        the cyclic shift of ``R(u), dynamics, reset``.
        """
        if self.encoding.kind == UNITARY:
            return self.dynamics
        if self.encoding.kind == RESET and self.order == ENCODE_FIRST:
            return self.encoding.reset @ self.dynamics
        raise DomainError(f"no unitary-rotation form for a {self.encoding.kind} encoding")

    def rotation(self, u: float) -> np.ndarray:
        """Rotation block ``R(u)`` of the unitary part of the encoding."""
        return self.encoding.unitary_part(u).W


def unit_eigenvector_overlap(ptm: BlockPTM, tol: float = numerics.TOL["unit_eigenvalue"]) -> float:
    """Largest ``|<v, b>|`` over unit-norm eigenvectors ``v`` of ``W`` with ``|lambda - 1| < tol``."""
    sp = ptm.spectrum()
    mask = np.abs(sp.eigenvalues - 1) < tol
    if not mask.any():
        return 0.0
    V = sp.eigenvectors[:, mask]
    V = V / np.linalg.norm(V, axis=0)
    return float(np.abs(V.conj().T @ ptm.b).max())


def sk_reservoir(
    n_qubits: int,
    J_s: float,
    disorder_K: float,
    seed: int,
    input_qubits: Sequence[int] = (1,),
    dt: float = 1.0,
    h: float = 1.0,
) -> ReservoirSystem:
    """SK Hamiltonian dynamics with the local reset ``R_y(arccos u)`` encoding."""
    ham = sample_sk_hamiltonian(n_qubits, J_s, disorder_K, h=h, seed=seed)
    meta = dict(ham.params, dt=float(dt), input_qubits=list(input_qubits))
    return ReservoirSystem(hamiltonian_step_ptm(ham, dt), reset_encoding_family(n_qubits, input_qubits), metadata=meta)


# --------------------------------------------------------------------------- evolution


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States ``r^(0), ..., r^(T)`` driven by ``u_0, ..., u_{T-1}``.

    ``states[t + 1]`` is the state right after input ``u_t``.
    """

    inputs: np.ndarray
    states: np.ndarray
    washout: int = 0

    def __post_init__(self):
        if self.states.shape[0] != self.inputs.size + 1:
            raise DimensionError(f"{self.states.shape[0]} states for {self.inputs.size} inputs")
        if self.washout < 0 or (self.inputs.size and self.washout >= self.inputs.size):
            raise DomainError(f"washout {self.washout} must lie in [0, {self.inputs.size})")

    @property
    def n_qubits(self) -> int:
        return int(round(np.log(self.states.shape[1] + 1) / np.log(4)))

    def __len__(self):
        return self.inputs.size

    def state(self, t: int) -> CoherenceState:
        return CoherenceState(self.n_qubits, self.states[t])

    def aligned(self) -> tuple[np.ndarray, np.ndarray]:
        """Post-washout ``(u_t, r^(t+1))`` pairs for readout training."""
        return self.inputs[self.washout :], self.states[self.washout + 1 :]


def evolve(sys: ReservoirSystem, s0: CoherenceState, inputs, washout: int = 0) -> Trajectory:
    """Iterate :meth:`ReservoirSystem.step_matrix` over ``inputs``."""
    if s0.n_qubits != sys.n_qubits:
        raise DimensionError(f"{s0.n_qubits}-qubit state for a {sys.n_qubits}-qubit system")
    u = np.asarray(inputs, dtype=float).reshape(-1)
    feats = sys.features(u)
    if u.size == 0:
        return Trajectory(u, s0.r[None].copy(), 0)
    full = _evolve_kernel(sys._cache["terms"], np.ascontiguousarray(feats), s0.ket)
    return Trajectory(u, full[:, 1:], washout)


def step(sys: ReservoirSystem, s: CoherenceState, u: float) -> CoherenceState:
    x = sys.step_matrix(u) @ s.ket
    return CoherenceState(s.n_qubits, x[1:])


# --------------------------------------------------------------------------- spectral diagnostics


def spectral_radius(M) -> float:
    if isinstance(M, BlockPTM):
        return M.spectral_radius
    return numerics.spectral_radius(M)


def driven_spectral_radii(sys: ReservoirSystem, inputs) -> np.ndarray:
    """``rho(L(u_t))`` for each input."""
    return np.array([numerics.spectral_radius(sys.linear_part(u)) for u in np.asarray(inputs, float).reshape(-1)])


def effective_spectral_radius(sys: ReservoirSystem, inputs) -> float:
    """Geometric mean of the driven spectral radii; zero if any of them is zero."""
    rho = driven_spectral_radii(sys, inputs)
    if rho.size == 0:
        raise DomainError("effective spectral radius needs at least one input")
    if np.any(rho == 0):
        return 0.0
    return float(np.exp(np.mean(np.log(rho))))


def product_spectral_norm_curve(sys: ReservoirSystem, inputs, log: bool = False) -> np.ndarray:
    """``sigma_max(L(u_{t-1}) ... L(u_0))`` for ``t = 1..T``.

    The running product is renormalised every step and its scale carried in
    log space, so arbitrarily small norms are represented.  With ``log=True``
    the natural logarithm is returned.
    """
    u = np.asarray(inputs, float).reshape(-1)
    out = np.empty(u.size)
    P = np.eye(sys.dim)
    logscale = 0.0
    for t, x in enumerate(u):
        P = sys.linear_part(x) @ P
        s = numerics.spectral_norm(P)
        if s == 0.0:
            out[t:] = -np.inf
            break
        logscale += np.log(s)
        P /= s
        out[t] = logscale
    return out if log else np.exp(out)


def fit_log_slope(values, log_input: bool = False, start: int = 0) -> float:
    """Least-squares slope of ``log(values[t])`` against ``t`` for ``t >= start``."""
    y = np.asarray(values, float)
    y = y if log_input else np.log(y)
    t = np.arange(y.size)
    keep = (t >= start) & np.isfinite(y)
    if keep.sum() < 2:
        raise DomainError("need at least two finite points to fit a slope")
    return float(np.polyfit(t[keep], y[keep], 1)[0])


# --------------------------------------------------------------------------- ESP indicators


def windowed_variance_norm(states: np.ndarray, w: int) -> np.ndarray:
    """Norm of the component-wise variance over the trailing window of ``w`` states.

    Entry ``t`` uses ``states[t - w + 1 : t + 1]``; entries before the first
    full window are NaN.
    """
    X = np.asarray(states, float)
    n = X.shape[0]
    out = np.full(n, np.nan)
    if n < w:
        return out
    c1 = np.cumsum(np.vstack([np.zeros((1, X.shape[1])), X]), axis=0)
    c2 = np.cumsum(np.vstack([np.zeros((1, X.shape[1])), X * X]), axis=0)
    s1 = c1[w:] - c1[:-w]
    s2 = c2[w:] - c2[:-w]
    var = np.maximum(s2 / w - (s1 / w) ** 2, 0.0)
    out[w - 1 :] = np.linalg.norm(var, axis=1)
    return out


@dataclass(frozen=True, eq=False)
class EspReport:
    """Echo-state indicators along a common input sequence.

    ``log_i_esp[t]`` is exact even where ``i_esp`` underflows.  ``i_ns`` is
    NaN before the reference time ``w``; ``degenerate[t]`` marks a windowed
    variance below the degeneracy floor, in which case the floor is used.
    """

    inputs: np.ndarray
    w: int
    log_i_esp: np.ndarray
    log_i_ns: np.ndarray
    variance_decay: np.ndarray
    degenerate: np.ndarray
    trajectories: tuple = ()

    @property
    def i_esp(self) -> np.ndarray:
        return np.exp(self.log_i_esp)

    @property
    def i_ns(self) -> np.ndarray:
        return np.exp(self.log_i_ns)

    @property
    def final_i_ns(self) -> float:
        return float(self.i_ns[-1])

    @property
    def any_degenerate(self) -> bool:
        return bool(self.degenerate[self.w :].any())


def _min_window_variance(trajs, w):
    V = np.vstack([windowed_variance_norm(tr.states, w) for tr in trajs])
    return V.min(axis=0)


def esp_indicators(sys: ReservoirSystem, s0: CoherenceState, s0p: CoherenceState, inputs, w: int = 20) -> EspReport:
    """I_ESP and I_NS for two initial states driven by the same inputs.

    ``I_ESP(t) = |r_t - r'_t| / |r_0 - r'_0|`` is obtained by propagating the
    difference vector itself (the affine parts cancel), which avoids the
    round-off floor of subtracting two nearly equal trajectories.
    ``I_NS(t)`` rescales it by ``sqrt(V(w) / V(t))`` where ``V`` is the smaller
    windowed-variance norm of the two trajectories and ``w`` is the first
    time with a full window.
    """
    u = np.asarray(inputs, float).reshape(-1)
    if w < 2:
        raise DomainError(f"window must be at least 2, got {w}")
    if u.size < 2 * w:
        raise DomainError(f"need at least {2 * w} inputs for window {w}, got {u.size}")
    d0 = s0.r - s0p.r
    if not np.any(d0):
        raise DomainError("initial states coincide")
    feats = np.ascontiguousarray(sys.features(u))
    log_esp = _difference_kernel(sys._cache["linear_terms"], feats, d0) - np.log(np.linalg.norm(d0))
    trajs = (evolve(sys, s0, u), evolve(sys, s0p, u))

    V = _min_window_variance(trajs, w)
    degenerate = np.zeros(u.size + 1, bool)
    degenerate[w - 1 :] = V[w - 1 :] < DEGENERATE_VARIANCE
    Vf = np.where(degenerate, DEGENERATE_VARIANCE, V)
    log_ns = np.full(u.size + 1, np.nan)
    log_ns[w:] = log_esp[w:] + 0.5 * (np.log(Vf[w]) - np.log(Vf[w:]))
    decay = np.full(u.size + 1, np.nan)
    decay[w:] = np.sqrt(Vf[w:] / Vf[w])
    return EspReport(u, w, log_esp, log_ns, decay, degenerate, trajs)


@dataclass(frozen=True)
class VarianceDecay:
    value: float
    degenerate: bool


def variance_decay(trajectories, w: int = 20) -> VarianceDecay:
    """``sqrt(V(T) / V(w))`` with ``V`` the smallest windowed-variance norm over ``trajectories``.

    Accepts one :class:`Trajectory`, several, or raw state arrays.  A
    reference variance below the degeneracy floor is flagged and floored.
    """
    if isinstance(trajectories, (Trajectory, np.ndarray)):
        trajectories = [trajectories]
    arrays = [tr.states if isinstance(tr, Trajectory) else np.asarray(tr, float) for tr in trajectories]
    n = arrays[0].shape[0]
    if n < 2 * w:
        raise DomainError(f"need at least {2 * w} states for window {w}, got {n}")
    V = np.vstack([windowed_variance_norm(X, w) for X in arrays]).min(axis=0)
    ref, fin = V[w], V[-1]
    degenerate = bool(ref < DEGENERATE_VARIANCE or fin < DEGENERATE_VARIANCE)
    ref = max(ref, DEGENERATE_VARIANCE)
    fin = max(fin, DEGENERATE_VARIANCE)
    return VarianceDecay(float(np.sqrt(fin / ref)), degenerate)


# --------------------------------------------------------------------------- fixed points and injectivity


def _raise_singular(A, what):
    eigs = numerics.eig(np.eye(A.shape[0]) - A, vectors=False).eigenvalues
    lam = eigs[np.argmin(np.abs(eigs - 1))]
    raise SingularMatrixError(f"{what} is singular: the linear part has eigenvalue {lam:.6g} (distance {abs(lam - 1):.2e} from 1)")


def fixed_point(target, u: float | None = None) -> CoherenceState:
    """Stationary state of a channel, or of one driven step at constant input ``u``.

    ``target`` is a :class:`BlockPTM` (solves ``(I - W) r = b``) or a
    :class:`ReservoirSystem`; for a system without ``u`` the dynamics alone
    is used.
    """
    if isinstance(target, ReservoirSystem):
        if u is None:
            L, c, n = target.dynamics.W, target.dynamics.b, target.n_qubits
        else:
            L, c, n = target.linear_part(u), target.influx(u), target.n_qubits
    else:
        L, c, n = target.W, target.b, target.n_qubits
    G = np.eye(L.shape[0]) - L
    try:
        x = numerics.solve(G, c)
    except SingularMatrixError:
        _raise_singular(G, "I - W" if u is None else f"G(u={u})")
    return CoherenceState(n, x)


@dataclass(frozen=True)
class InjectivityReport:
    pairs: np.ndarray
    separations: np.ndarray
    ratios: np.ndarray
    singular: np.ndarray
    threshold: float

    @property
    def min_ratio(self) -> float:
        return float(self.ratios.min()) if self.ratios.size else float("nan")

    @property
    def failures(self) -> np.ndarray:
        return self.ratios < self.threshold

    @property
    def injective(self) -> bool:
        return not bool(self.failures.any())


def _driven_fixed_point(sys, u):
    """Returns ``(x, singular)``; singular-but-consistent systems give the minimum-norm solution."""
    L, c = sys.linear_part(u), sys.influx(u)
    G = np.eye(L.shape[0]) - L
    if numerics.condition_number(G) <= numerics.TOL["singular_cond"]:
        return numerics.solve(G, c), False
    x, *_ = np.linalg.lstsq(G, c, rcond=None)
    if np.linalg.norm(G @ x - c) > numerics.TOL["solve_residual"] * (1 + np.linalg.norm(c)):
        _raise_singular(G, f"G(u={u})")
    return x, True


def injectivity_probe(sys: ReservoirSystem, input_pairs, threshold: float = 1e-8) -> InjectivityReport:
    """Separation of driven fixed points ``G(u)^-1 c(u)`` for pairs of inputs.

    Reports ``|x(u) - x(v)| / |u - v|`` per pair.  When ``G(u)`` is singular
    but ``c(u)`` lies in its range (as for influx-free unitary systems) the
    minimum-norm solution is used and the pair is marked ``singular``.
    Inconsistent singular systems raise :class:`SingularMatrixError`.
    """
    pairs = np.asarray(input_pairs, float).reshape(-1, 2)
    seps = np.empty(len(pairs))
    ratios = np.empty(len(pairs))
    sing = np.zeros(len(pairs), bool)
    for i, (a, b) in enumerate(pairs):
        if a == b:
            raise DomainError(f"pair {i} has identical inputs")
        xa, sa = _driven_fixed_point(sys, a)
        xb, sb = _driven_fixed_point(sys, b)
        seps[i] = np.linalg.norm(xa - xb)
        ratios[i] = seps[i] / abs(a - b)
        sing[i] = sa or sb
    return InjectivityReport(pairs, seps, ratios, sing, threshold)


# --------------------------------------------------------------------------- influx subspace


@dataclass(frozen=True)
class CoherenceSubspace:
    """Split of coherence space by the unit-eigenvalue eigenvectors of ``W``.

    ``basis`` is an orthonormal basis of the complement of the unit
    eigenvectors; ``projector`` is ``basis @ basis.T``.
    """

    basis: np.ndarray
    unit_basis: np.ndarray
    projected_radius: float
    influx_residual: float
    eigvec_condition: float

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def influx_inside(self) -> bool:
        return self.influx_residual <= 1e-8


def _mgs(vectors: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalisation pass; drops dependent columns."""
    out = []
    for v in vectors.T:
        v = v.copy()
        for _ in range(2):
            for q in out:
                v -= (q @ v) * q
        n = np.linalg.norm(v)
        if n > tol:
            out.append(v / n)
    return np.array(out).T if out else np.zeros((vectors.shape[0], 0))


def coherence_subspace(ptm: BlockPTM, tol: float = numerics.TOL["unit_eigenvalue"]) -> CoherenceSubspace:
    sp = ptm.spectrum()
    D = ptm.dim
    cond = np.linalg.cond(sp.eigenvectors)
    if cond > 1e10:
        warnings.warn(f"W is close to defective (eigenvector condition {cond:.2e})", RuntimeWarning, stacklevel=2)
    mask = np.abs(sp.eigenvalues - 1) < tol
    V = sp.eigenvectors[:, mask]
    # unit eigenvalue of a real matrix: real and imaginary parts both span the eigenspace
    unit = _mgs(np.hstack([V.real, V.imag])) if mask.any() else np.zeros((D, 0))
    full = _mgs(np.hstack([unit, np.eye(D)]))
    Q = full[:, unit.shape[1] :]
    rho = numerics.spectral_radius(Q.T @ ptm.W @ Q) if Q.shape[1] else 0.0
    resid = float(np.linalg.norm(ptm.b - Q @ (Q.T @ ptm.b)))
    return CoherenceSubspace(Q, unit, rho, resid, float(cond))


# --------------------------------------------------------------------------- stability certificates


@dataclass(frozen=True)
class SchurCheck:
    stable: bool
    margin: float


def schur_stable_check(M, P=None) -> SchurCheck:
    """Largest eigenvalue of ``M^T P M - P``; ``M`` is Schur stable w.r.t. ``P`` iff it is negative."""
    M = np.asarray(M, float)
    P = np.eye(M.shape[0]) if P is None else np.asarray(P, float)
    if P.shape != M.shape:
        raise DimensionError(f"certificate shape {P.shape} does not match {M.shape}")
    if not np.allclose(P, P.T, atol=1e-12):
        raise DomainError("certificate matrix is not symmetric")
    if np.linalg.eigvalsh(P).min() <= 0:
        raise DomainError("certificate matrix is not positive definite")
    S = M.T @ P @ M - P
    margin = float(np.linalg.eigvalsh(0.5 * (S + S.T)).max())
    return SchurCheck(margin < 0, margin)


@dataclass(frozen=True)
class ContractionCheck:
    """Per-input contraction diagnostics of the driven linear part ``L(u)``.

    ``symmetric_margin`` is the smallest eigenvalue of ``G + G^T`` with
    ``G = I - L``.  ``norm_margin`` is ``1 - sigma_max(L)``; positive means
    every difference vector shrinks strictly in one step at that input.
    """

    inputs: np.ndarray
    symmetric_margin: np.ndarray
    norm_margin: np.ndarray

    @property
    def strictly_contracting(self) -> bool:
        return bool((self.norm_margin > 0).all())


def contraction_check(sys: ReservoirSystem, inputs) -> ContractionCheck:
    u = np.asarray(inputs, float).reshape(-1)
    sym = np.empty(u.size)
    nm = np.empty(u.size)
    for i, x in enumerate(u):
        L = sys.linear_part(x)
        G = np.eye(L.shape[0]) - L
        sym[i] = np.linalg.eigvalsh(G + G.T).min()
        nm[i] = 1 - numerics.spectral_norm(L)
    return ContractionCheck(u, sym, nm)


# --------------------------------------------------------------------------- export


def trajectory_rows(traj: Trajectory, report: EspReport | None = None):
    """Rows ``t, u_t, r_1..r_D[, I_ESP, I_NS, degenerate]``; ``u_t`` is empty at the final time."""
    D = traj.states.shape[1]
    header = ["t", "u_t"] + [f"r{i + 1}" for i in range(D)]
    if report is not None:
        header += ["i_esp", "i_ns", "degenerate"]
    rows = []
    for t in range(traj.states.shape[0]):
        row = [t, float(traj.inputs[t]) if t < traj.inputs.size else ""]
        row += [float(x) for x in traj.states[t]]
        if report is not None:
            row += [float(report.i_esp[t]), float(report.i_ns[t]), int(report.degenerate[t])]
        rows.append(row)
    return header, rows


def write_trajectory_csv(path, traj: Trajectory, report: EspReport | None = None) -> None:
    header, rows = trajectory_rows(traj, report)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write trajectory CSV to {path}: {exc}") from exc


def esp_report_to_dict(report: EspReport, sys: ReservoirSystem | None = None) -> dict:
    def clean(a):
        return [None if not np.isfinite(x) else float(x) for x in a]

    out = {
        "w": report.w,
        "inputs": report.inputs.tolist(),
        "log_i_esp": clean(report.log_i_esp),
        "log_i_ns": clean(report.log_i_ns),
        "variance_decay": clean(report.variance_decay),
        "degenerate": report.degenerate.astype(int).tolist(),
    }
    if sys is not None:
        from .serialization import ptm_to_dict

        out["system"] = {
            "dynamics": ptm_to_dict(sys.dynamics),
            "encoding": {"kind": sys.encoding.kind, "name": sys.encoding.name, "input_qubits": list(sys.encoding.input_qubits)},
            "order": sys.order,
            "metadata": sys.metadata,
        }
    return out


def write_esp_json(path, report: EspReport, sys: ReservoirSystem | None = None) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(esp_report_to_dict(report, sys), fh, indent=1)
    except OSError as exc:
        raise OSError(f"cannot write ESP report to {path}: {exc}") from exc
