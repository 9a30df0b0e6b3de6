"""One-dimensional multiplicative-input reservoir ``x_{t+1} = a u_t x_t + b``.

Its state-difference dynamics ``dx_{t+1} = a u_t dx_t`` mirror the driven
linear part of a PTM reservoir, with ``a`` playing the role of the spectral
radius and ``b`` the coherence influx, and its memory capacity is known in
closed form.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .capacity import estimate_ipc, estimate_mc
from .exceptions import DomainError

SATURATION = 1e100
UNIFORM_BOUND = float(np.sqrt(3.0))

HOLDS = "holds"
FAILS_A_ZERO = "fails-a-zero"
FAILS_A_LARGE = "fails-a-large"
FAILS_B_ZERO = "fails-b-zero"
HOLDS_IN_MEAN = "holds-in-mean"


@dataclass(frozen=True)
class MrcParams:
    a: float
    b: float
    x0: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite([self.a, self.b, self.x0])):
            raise DomainError("mRC parameters must be finite")


@dataclass(frozen=True)
class MrcRun:
    """States ``x_0..x_T``; ``states[t + 1]`` follows ``inputs[t]``."""

    states: np.ndarray
    saturated: bool


def mrc_run(p: MrcParams, inputs) -> MrcRun:
    """Iterate the update; stops growing and flags once ``|x| > 1e100``."""
    u = np.asarray(inputs, float).reshape(-1)
    x = np.empty(u.size + 1)
    x[0] = p.x0
    saturated = False
    for t in range(u.size):
        x[t + 1] = p.a * u[t] * x[t] + p.b
        if abs(x[t + 1]) > SATURATION or not np.isfinite(x[t + 1]):
            x[t + 1 :] = np.sign(x[t + 1]) * SATURATION if np.isfinite(x[t + 1]) else np.nan
            saturated = True
            break
    return MrcRun(x, saturated)


def mrc_closed_form(p: MrcParams, inputs) -> np.ndarray:
    """``x_t = (prod_{s<t} a u_s) x0 + b sum_{s<t} prod_{s<r<t} a u_r``, evaluated term by term."""
    u = np.asarray(inputs, float).reshape(-1)
    out = np.empty(u.size + 1)
    for t in range(u.size + 1):
        total = np.prod(p.a * u[:t]) * p.x0
        for s in range(t):
            total += p.b * np.prod(p.a * u[s + 1 : t])
        out[t] = total
    return out


def mrc_fixed_point(p: MrcParams, u: float) -> float:
    """State reached under the constant input ``u``: ``b / (1 - a u)``."""
    if p.a * u == 1:
        raise DomainError(f"a*u = 1 has no fixed point (a={p.a}, u={u})")
    return p.b / (1 - p.a * u)


def mrc_esp_class(p: MrcParams, input_law: str = "fixed-domain") -> str:
    """Nonstationary-ESP classification of an mRC.

    ``input_law`` is ``"fixed-domain"`` (inputs may sit anywhere in
    ``[-1, 1]``, including the worst case ``|u| = 1``) or ``"uniform"``
    (i.i.d. uniform inputs, where ``E[u^2] = 1/3`` relaxes the gain bound to
    ``|a| < sqrt(3)`` in mean square).
    """
    if input_law not in ("fixed-domain", "uniform"):
        raise DomainError(f"unknown input law {input_law!r}")
    a = abs(p.a)
    if a == 0:
        return FAILS_A_ZERO
    if p.b == 0:
        return FAILS_B_ZERO
    if a < 1:
        return HOLDS
    if input_law == "uniform" and a < UNIFORM_BOUND:
        return HOLDS_IN_MEAN
    return FAILS_A_LARGE


def mrc_analytic_mc(a: float) -> float:
    """Total linear memory capacity under uniform inputs, ``1 - a^2 / 3``."""
    if not 0 < abs(a) < UNIFORM_BOUND:
        raise DomainError(f"closed-form capacity needs 0 < |a| < sqrt(3), got {a}")
    return 1.0 - a * a / 3.0


@dataclass(frozen=True)
class MrcCapacityRow:
    a: float
    b: float
    empirical_mc: float
    analytic_mc: float
    tail_mc: float
    ipc_2plus: float


def mrc_capacity(a: float, b: float, n_samples: int = 100_000, washout: int | None = None, k_max: int = 10, seed: int = 0, ipc_degree: int = 0, ipc_delay: int = 5) -> MrcCapacityRow:
    """Empirical MC of an mRC driven by ``Uniform[-1, 1]`` inputs.

    ``n_samples`` is the full input length including the washout, which
    defaults to 10% of it.  ``tail_mc`` is ``sum_{k>=1} C_k``.  With ``ipc_degree >= 2``
    the capacity of all degree-2..ipc_degree targets is also summed.
    """
    washout = n_samples // 10 if washout is None else washout
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1, 1, n_samples)
    run = mrc_run(MrcParams(a, b), u)
    if run.saturated:
        raise DomainError(f"mRC with a={a} saturated")
    x = run.states[1:]
    rep = estimate_mc(u, x, k_max=k_max, washout=washout)
    ipc2 = float("nan")
    if ipc_degree >= 2:
        ipc = estimate_ipc(u, x, max_degree=ipc_degree, max_delay=ipc_delay, washout=washout)
        ipc2 = sum(v for d, v in ipc.ipc_by_degree.items() if d >= 2)
    analytic = mrc_analytic_mc(a) if 0 < abs(a) < UNIFORM_BOUND else float("nan")
    return MrcCapacityRow(float(a), float(b), rep.mc_total, analytic, float(rep.mc_by_delay[1:].sum()), ipc2)


def mrc_grid(a_values, b: float = 0.5, **kwargs) -> list[MrcCapacityRow]:
    return [mrc_capacity(a, b, **kwargs) for a in a_values]


def write_mrc_csv(path, rows) -> None:
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["a", "b", "empirical_mc", "analytic_mc", "tail_mc", "ipc_2plus"])
            for r in rows:
                w.writerow([r.a, r.b, r.empirical_mc, r.analytic_mc, r.tail_mc, r.ipc_2plus])
    except OSError as exc:
        raise OSError(f"cannot write mRC CSV to {path}: {exc}") from exc
