"""Memory capacity (MC) and information processing capacity (IPC).

``states[t]`` must be the reservoir state right after ``inputs[t]`` was fed
in, so delay ``k`` asks how well a linear readout of ``states[t]``
reconstructs ``inputs[t - k]``.  Every capacity is the squared correlation
of the best linear (affine) readout:

    C = c^T (Sigma + eps I)^-1 c / Var(y),

with ``Sigma`` the state covariance and ``c`` the state/target covariance.
"""

from __future__ import annotations

import csv
import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre

from .exceptions import DimensionError, DomainError

MIN_SAMPLES_PER_DIM = 10


@dataclass
class CapacityReport:
    mc_by_delay: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ipc_by_degree: dict = field(default_factory=dict)
    ipc_targets: list = field(default_factory=list)
    ipc_values: np.ndarray = field(default_factory=lambda: np.zeros(0))
    mc_noise_floor: np.ndarray | None = None
    ipc_noise_floor: np.ndarray | None = None
    config: dict = field(default_factory=dict)
    constant_states: bool = False

    @property
    def mc_total(self) -> float:
        return float(self.mc_by_delay.sum())

    def rows(self):
        """``(kind, delay, degree, capacity, noise_floor)`` rows for CSV export."""
        out = []
        for k, c in enumerate(self.mc_by_delay):
            nf = "" if self.mc_noise_floor is None else float(self.mc_noise_floor[k])
            out.append(("mc", k, 1, float(c), nf))
        for i, (target, c) in enumerate(zip(self.ipc_targets, self.ipc_values)):
            nf = "" if self.ipc_noise_floor is None else float(self.ipc_noise_floor[i])
            delays = ";".join(str(k) for k, _ in target)
            degree = sum(d for _, d in target)
            out.append(("ipc", delays, degree, float(c), nf))
        return out

    def to_dict(self) -> dict:
        return {
            "mc_by_delay": self.mc_by_delay.tolist(),
            "mc_total": self.mc_total,
            "ipc_by_degree": {str(k): v for k, v in self.ipc_by_degree.items()},
            "ipc_targets": [[list(p) for p in t] for t in self.ipc_targets],
            "ipc_values": np.asarray(self.ipc_values).tolist(),
            "mc_noise_floor": None if self.mc_noise_floor is None else self.mc_noise_floor.tolist(),
            "ipc_noise_floor": None if self.ipc_noise_floor is None else self.ipc_noise_floor.tolist(),
            "config": self.config,
            "constant_states": self.constant_states,
        }


def write_capacity_csv(path, report: CapacityReport) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["kind", "delay", "degree", "capacity", "noise_floor"])
            w.writerows(report.rows())
    except OSError as exc:
        raise OSError(f"cannot write capacity CSV to {path}: {exc}") from exc


def write_capacity_json(path, report: CapacityReport) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(report.to_dict(), fh, indent=1)
    except OSError as exc:
        raise OSError(f"cannot write capacity JSON to {path}: {exc}") from exc


# --------------------------------------------------------------------------- core estimator


def _prepare(inputs, states, washout, max_delay):
    u = np.asarray(inputs, float).reshape(-1)
    X = np.asarray(states, float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != u.size:
        raise DimensionError(f"{X.shape[0]} states for {u.size} inputs; pass the states aligned with the inputs")
    if washout < 0 or max_delay < 0:
        raise DomainError("washout and delays must be non-negative")
    start = max(washout, max_delay)
    n = u.size - start
    if n < MIN_SAMPLES_PER_DIM * X.shape[1]:
        raise DomainError(f"{n} usable samples for a {X.shape[1]}-dimensional state; need {MIN_SAMPLES_PER_DIM * X.shape[1]}")
    return u, X, start


class _Readout:
    """Centred state block with a regularised covariance factorisation."""

    def __init__(self, X, ridge_eps):
        self.Xc = X - X.mean(axis=0)
        n, dim = self.Xc.shape
        self.n = n
        Sigma = self.Xc.T @ self.Xc / n
        tr = float(np.trace(Sigma))
        self.constant = tr <= 1e-24 * max(1.0, float(np.abs(X).max()) ** 2)
        eps = 1e-9 * tr / dim if ridge_eps is None else float(ridge_eps)
        self.eps = eps
        if not self.constant:
            self.chol = np.linalg.cholesky(Sigma + eps * np.eye(dim))

    def capacities(self, Y) -> np.ndarray:
        """Capacities for each column of the target block ``Y``."""
        Y = np.asarray(Y, float)
        if Y.ndim == 1:
            Y = Y[:, None]
        if self.constant:
            return np.zeros(Y.shape[1])
        Yc = Y - Y.mean(axis=0)
        var = (Yc * Yc).sum(axis=0) / self.n
        c = self.Xc.T @ Yc / self.n
        z = np.linalg.solve(self.chol, c)
        out = (z * z).sum(axis=0)
        return np.where(var > 0, out / np.where(var > 0, var, 1.0), 0.0)


def _lagged(u, start, k):
    return u[start - k : u.size - k]


def estimate_mc(inputs, states, k_max: int = 30, ridge_eps: float | None = None, washout: int = 0, surrogates: int = 0, seed: int = 0) -> CapacityReport:
    """Linear memory capacity ``C_k`` for ``k = 0..k_max``.

    All delays are estimated on the same sample window starting at
    ``max(washout, k_max)``.  With ``surrogates > 0`` the same estimator is
    applied to that many shuffled copies of the input sequence and the mean
    capacity per delay is reported as the noise floor.
    """
    u, X, start = _prepare(inputs, states, washout, k_max)
    ro = _Readout(X[start:], ridge_eps)
    Y = np.column_stack([_lagged(u, start, k) for k in range(k_max + 1)])
    mc = ro.capacities(Y)
    floor = None
    if surrogates > 0:
        rng = np.random.default_rng(seed)
        acc = np.zeros(k_max + 1)
        for _ in range(surrogates):
            us = rng.permutation(u)
            acc += ro.capacities(np.column_stack([_lagged(us, start, k) for k in range(k_max + 1)]))
        floor = acc / surrogates
    cfg = {"k_max": k_max, "washout": washout, "start": start, "ridge_eps": ro.eps, "samples": ro.n, "surrogates": surrogates}
    return CapacityReport(mc_by_delay=mc, mc_noise_floor=floor, config=cfg, constant_states=ro.constant)


# --------------------------------------------------------------------------- IPC


def normalized_legendre(degree: int, u) -> np.ndarray:
    """Legendre polynomial scaled to unit second moment under ``Uniform[-1, 1]``."""
    coef = np.zeros(degree + 1)
    coef[degree] = np.sqrt(2 * degree + 1)
    return legendre.legval(np.asarray(u, float), coef)


def ipc_targets(max_degree: int, max_delay: int) -> list[tuple[tuple[int, int], ...]]:
    """All products of Legendre factors at distinct delays with total degree ``1..max_degree``.

    Each target is a tuple of ``(delay, degree)`` pairs sorted by delay.
    """
    out = []
    delays = range(max_delay + 1)
    for d in range(1, max_degree + 1):
        for n_factors in range(1, d + 1):
            for ks in itertools.combinations(delays, n_factors):
                for degs in _compositions(d, n_factors):
                    out.append(tuple(zip(ks, degs)))
    return out


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _target_block(u, start, targets):
    cache = {}
    cols = []
    for target in targets:
        y = np.ones(u.size - start)
        for k, deg in target:
            key = (k, deg)
            if key not in cache:
                cache[key] = normalized_legendre(deg, _lagged(u, start, k))
            y = y * cache[key]
        cols.append(y)
    return np.column_stack(cols)


def estimate_ipc(
    inputs,
    states,
    max_degree: int = 3,
    max_delay: int = 10,
    washout: int = 0,
    ridge_eps: float | None = None,
    surrogates: int = 0,
    seed: int = 0,
) -> CapacityReport:
    """Information processing capacity summed per total degree.

    The linear (degree-1) terms coincide with :func:`estimate_mc` up to
    ``max_delay``.
    """
    if not 1 <= max_degree <= 4:
        raise DomainError(f"max_degree must lie in [1, 4], got {max_degree}")
    u, X, start = _prepare(inputs, states, washout, max_delay)
    ro = _Readout(X[start:], ridge_eps)
    targets = ipc_targets(max_degree, max_delay)
    vals = ro.capacities(_target_block(u, start, targets))
    degrees = np.array([sum(d for _, d in t) for t in targets])
    by_degree = {d: float(vals[degrees == d].sum()) for d in range(1, max_degree + 1)}
    floor = None
    if surrogates > 0:
        rng = np.random.default_rng(seed)
        acc = np.zeros(len(targets))
        for _ in range(surrogates):
            acc += ro.capacities(_target_block(rng.permutation(u), start, targets))
        floor = acc / surrogates
    cfg = {
        "max_degree": max_degree,
        "max_delay": max_delay,
        "washout": washout,
        "start": start,
        "ridge_eps": ro.eps,
        "samples": ro.n,
        "basis": "legendre",
        "surrogates": surrogates,
    }
    return CapacityReport(
        ipc_by_degree=by_degree,
        ipc_targets=targets,
        ipc_values=vals,
        ipc_noise_floor=floor,
        config=cfg,
        constant_states=ro.constant,
    )


def estimate_capacity(inputs, states, k_max: int = 30, max_degree: int = 3, max_delay: int = 10, washout: int = 0, ridge_eps: float | None = None) -> CapacityReport:
    """MC and IPC in one report."""
    mc = estimate_mc(inputs, states, k_max=k_max, washout=washout, ridge_eps=ridge_eps)
    ipc = estimate_ipc(inputs, states, max_degree=max_degree, max_delay=max_delay, washout=washout, ridge_eps=ridge_eps)
    ipc.mc_by_delay = mc.mc_by_delay
    ipc.config = {"mc": mc.config, "ipc": ipc.config}
    return ipc
