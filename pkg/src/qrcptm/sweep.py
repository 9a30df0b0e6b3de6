"""Phase-diagram sweeps of SK reservoirs over coupling scale and disorder.

Each (J_s, K, sample) triple gets a seed derived from the master seed and its
grid position, so the records do not depend on the number of workers or on
the order in which cells finish.  Finished records are appended to an
optional JSONL checkpoint and skipped on restart.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable

import numpy as np

from .capacity import estimate_mc
from .channels import derive_seed
from .exceptions import DomainError
from .pauli import random_pure_state
from .reservoir import effective_spectral_radius, esp_indicators, evolve, sk_reservoir

COLUMNS = (
    "row",
    "col",
    "sample",
    "J_s",
    "K",
    "seed",
    "rho_W",
    "rho_eff",
    "sigma_max_W",
    "influx_norm",
    "influx_gain",
    "log_i_ns_final",
    "i_ns_final",
    "variance_decay",
    "mc_total",
    "mc_1",
    "flags",
)


@dataclass(frozen=True)
class SweepConfig:
    """Sweep settings.

    Rows of the grid index the disorder strength ``K`` and columns the
    coupling scale ``J_s``; both axes are log-spaced.  A single-point axis
    sits at the lower end of its range.
    """

    seed: int
    j_range: tuple = (1e-2, 1e2)
    k_range: tuple = (1e-2, 1e2)
    n_j: int = 12
    n_k: int = 12
    samples: int = 3
    n_qubits: int = 2
    input_qubits: tuple = (1,)
    dt: float = 1.0
    h: float = 1.0
    esp_length: int = 200
    window: int = 20
    mc_length: int = 100_000
    mc_washout: int = 10_000
    k_max: int = 30
    workers: int = 1
    checkpoint: str | None = None

    def __post_init__(self):
        if self.seed is None:
            raise DomainError("a master seed is required")
        if self.n_j < 1 or self.n_k < 1:
            raise DomainError("each grid axis needs at least one point")
        if self.samples < 1:
            raise DomainError("need at least one sample per cell")
        if self.esp_length < 2 * self.window:
            raise DomainError("ESP input length must be at least twice the window")
        object.__setattr__(self, "j_range", tuple(float(x) for x in self.j_range))
        object.__setattr__(self, "k_range", tuple(float(x) for x in self.k_range))
        object.__setattr__(self, "input_qubits", tuple(int(q) for q in self.input_qubits))

    @property
    def j_values(self) -> np.ndarray:
        return np.logspace(np.log10(self.j_range[0]), np.log10(self.j_range[1]), self.n_j)

    @property
    def k_values(self) -> np.ndarray:
        return np.logspace(np.log10(self.k_range[0]), np.log10(self.k_range[1]), self.n_k)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["j_range"] = list(self.j_range)
        d["k_range"] = list(self.k_range)
        d["input_qubits"] = list(self.input_qubits)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown sweep config keys: {sorted(unknown)}")
        return cls(**d)

    def fingerprint(self) -> str:
        """Hash of every setting that affects record values."""
        d = self.to_dict()
        d.pop("workers")
        d.pop("checkpoint")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class SweepGrid:
    config: SweepConfig
    records: list = field(default_factory=list)

    def metric(self, name: str) -> np.ndarray:
        """Array of shape ``(n_k, n_j, samples)`` for one record field."""
        if name not in COLUMNS or name in ("flags",):
            raise DomainError(f"unknown metric {name!r}")
        cfg = self.config
        out = np.full((cfg.n_k, cfg.n_j, cfg.samples), np.nan)
        for r in self.records:
            out[r["row"], r["col"], r["sample"]] = r[name]
        return out

    def cell_metric(self, name: str) -> np.ndarray:
        """Per-cell geometric mean over samples of the positive values of ``name``."""
        vals = self.metric(name)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(vals > 0, np.log(np.where(vals > 0, vals, 1.0)), np.nan)
        cnt = np.sum(np.isfinite(logs), axis=2)
        tot = np.nansum(logs, axis=2)
        return np.where(cnt > 0, np.exp(tot / np.maximum(cnt, 1)), np.nan)


# --------------------------------------------------------------------------- one record


def _nan_record(cfg, row, col, sample, seed, J, K, flags):
    rec = dict.fromkeys(COLUMNS, float("nan"))
    rec.update(row=row, col=col, sample=sample, J_s=float(J), K=float(K), seed=seed, flags=flags)
    return rec


def sweep_record(cfg: SweepConfig, row: int, col: int, sample: int) -> dict:
    """All diagnostics for one Hamiltonian; failures become flagged records."""
    J = float(cfg.j_values[col])
    K = float(cfg.k_values[row])
    seed = derive_seed(cfg.seed, row, col, sample)
    try:
        sys = sk_reservoir(cfg.n_qubits, J, K, seed, cfg.input_qubits, dt=cfg.dt, h=cfg.h)
        rng = np.random.default_rng(derive_seed(seed, 1))
        ref = sys.reference_ptm()
        b = ref.influx_norm
        u = rng.uniform(-1, 1, cfg.esp_length)
        s0 = random_pure_state(cfg.n_qubits, rng)
        s1 = random_pure_state(cfg.n_qubits, rng)
        rep = esp_indicators(sys, s0, s1, u, cfg.window)
        flags = []
        if rep.any_degenerate:
            flags.append("degenerate-variance")
        rec = {
            "row": row,
            "col": col,
            "sample": sample,
            "J_s": J,
            "K": K,
            "seed": seed,
            "rho_W": ref.spectral_radius,
            "rho_eff": effective_spectral_radius(sys, u),
            "sigma_max_W": ref.spectral_norm,
            "influx_norm": b,
            "influx_gain": float(np.linalg.norm(ref.W @ ref.b) / b) if b > 0 else float("nan"),
            "log_i_ns_final": float(rep.log_i_ns[-1]),
            "i_ns_final": float(rep.i_ns[-1]),
            "variance_decay": float(rep.variance_decay[-1]),
        }
        if cfg.mc_length > 0:
            u_mc = rng.uniform(-1, 1, cfg.mc_length)
            traj = evolve(sys, s0, u_mc)
            mc = estimate_mc(u_mc, traj.states[1:], k_max=cfg.k_max, washout=cfg.mc_washout)
            if mc.constant_states:
                flags.append("constant-states")
            rec["mc_total"] = mc.mc_total
            rec["mc_1"] = float(mc.mc_by_delay[1]) if cfg.k_max >= 1 else float("nan")
        else:
            rec["mc_total"] = rec["mc_1"] = float("nan")
        rec["flags"] = ";".join(flags)
        return rec
    except Exception as exc:  # every failure is recorded, never raised
        return _nan_record(cfg, row, col, sample, seed, J, K, f"error:{type(exc).__name__}:{exc}")


def _task(args):
    cfg, row, col, sample = args
    return sweep_record(cfg, row, col, sample)


# --------------------------------------------------------------------------- driver


def _load_checkpoint(cfg: SweepConfig) -> dict:
    done = {}
    if not cfg.checkpoint or not os.path.exists(cfg.checkpoint):
        return done
    with open(cfg.checkpoint) as fh:
        lines = [ln for ln in fh if ln.strip()]
    if not lines:
        return done
    head = json.loads(lines[0])
    if head.get("fingerprint") != cfg.fingerprint():
        raise DomainError(f"checkpoint {cfg.checkpoint} belongs to a different configuration")
    for ln in lines[1:]:
        try:
            rec = _decode(json.loads(ln))
        except json.JSONDecodeError:
            # a partially written last line from an interrupted run
            continue
        done[(rec["row"], rec["col"], rec["sample"])] = rec
    return done


def run_sweep(cfg: SweepConfig, progress=None) -> SweepGrid:
    """Evaluate every (cell, sample) of the grid.

    ``progress`` is an optional callable receiving ``(done, total)``.
    """
    keys = [(r, c, s) for r in range(cfg.n_k) for c in range(cfg.n_j) for s in range(cfg.samples)]
    done = _load_checkpoint(cfg)
    todo = [k for k in keys if k not in done]
    fh = None
    if cfg.checkpoint:
        new = not os.path.exists(cfg.checkpoint) or os.path.getsize(cfg.checkpoint) == 0
        fh = open(cfg.checkpoint, "a")
        if new:
            fh.write(json.dumps({"fingerprint": cfg.fingerprint(), "config": cfg.to_dict()}) + "\n")
            fh.flush()
    try:
        tasks = [(cfg, *k) for k in todo]
        if cfg.workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                results = pool.map(_task, tasks, chunksize=max(1, len(tasks) // (8 * cfg.workers)))
                _collect(results, done, fh, progress, len(keys))
        else:
            _collect(map(_task, tasks), done, fh, progress, len(keys))
    finally:
        if fh is not None:
            fh.close()
    return SweepGrid(cfg, [done[k] for k in keys])


def _collect(results, done, fh, progress, total):
    for rec in results:
        done[(rec["row"], rec["col"], rec["sample"])] = rec
        if fh is not None:
            fh.write(json.dumps(_encode(rec)) + "\n")
            fh.flush()
        if progress is not None:
            progress(len(done), total)


# --------------------------------------------------------------------------- smoothing


def kernel_smooth(values, size: int = 5) -> tuple[np.ndarray, np.ndarray]:
    """Geometric mean over a ``size x size`` neighbourhood that excludes the centre.

    ``values`` is a 2-d array.  Neighbours outside the grid are dropped, as
    are non-positive or non-finite values.  Returns the smoothed array and
    the per-cell count of excluded in-grid neighbours; cells with no usable
    neighbour become NaN.
    """
    V = np.asarray(values, float)
    if V.ndim != 2:
        raise DomainError("kernel_smooth expects a 2-d grid")
    if size % 2 != 1 or size < 3:
        raise DomainError("kernel size must be an odd integer >= 3")
    r = size // 2
    ok = np.isfinite(V) & (V > 0)
    L = np.where(ok, np.log(np.where(ok, V, 1.0)), 0.0)
    n0, n1 = V.shape
    pad_L = np.pad(L, r)
    pad_ok = np.pad(ok.astype(float), r)
    pad_in = np.pad(np.ones_like(V), r)
    s = np.zeros_like(V)
    cnt = np.zeros_like(V)
    inside = np.zeros_like(V)
    for di in range(-r, r + 1):
        for dj in range(-r, r + 1):
            if di == 0 and dj == 0:
                continue
            sl = (slice(r + di, r + di + n0), slice(r + dj, r + dj + n1))
            s += pad_L[sl]
            cnt += pad_ok[sl]
            inside += pad_in[sl]
    out = np.where(cnt > 0, np.exp(s / np.maximum(cnt, 1)), np.nan)
    return out, (inside - cnt).astype(int)


def smooth_metric(grid: SweepGrid, name: str, size: int = 5) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell geometric mean over samples followed by :func:`kernel_smooth`."""
    return kernel_smooth(grid.cell_metric(name), size)


# --------------------------------------------------------------------------- export


def _encode(rec: dict) -> dict:
    out = {}
    for k, v in rec.items():
        if isinstance(v, float) and not math.isfinite(v):
            v = {"float": repr(v)}
        out[k] = v
    return out


def _decode(rec: dict) -> dict:
    return {k: float(v["float"]) if isinstance(v, dict) and "float" in v else v for k, v in rec.items()}


def _version() -> str:
    from . import __version__

    return __version__


def grid_to_dict(grid: SweepGrid) -> dict:
    return {
        "version": _version(),
        "columns": list(COLUMNS),
        "config": grid.config.to_dict(),
        "records": [_encode(r) for r in grid.records],
    }


def grid_from_dict(d: dict) -> SweepGrid:
    cfg = SweepConfig.from_dict(d["config"])
    return SweepGrid(cfg, [_decode(r) for r in d["records"]])


def export(grid: SweepGrid, path, fmt: str | None = None) -> None:
    """Write ``grid`` as CSV (fixed column order) or JSON (config echo and records)."""
    fmt = fmt or os.path.splitext(str(path))[1].lstrip(".").lower()
    try:
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(COLUMNS)
                for r in grid.records:
                    w.writerow([repr(r[c]) if isinstance(r[c], float) else r[c] for c in COLUMNS])
        elif fmt == "json":
            with open(path, "w") as fh:
                json.dump(grid_to_dict(grid), fh)
        else:
            raise DomainError(f"unknown export format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write sweep output to {path}: {exc}") from exc


def import_json(path) -> SweepGrid:
    try:
        with open(path) as fh:
            return grid_from_dict(json.load(fh))
    except OSError as exc:
        raise OSError(f"cannot read sweep output from {path}: {exc}") from exc


def records_where(grid: SweepGrid, predicate) -> list:
    return [r for r in grid.records if predicate(r)]


def finite_column(records: Iterable[dict], name: str) -> np.ndarray:
    return np.array([r[name] for r in records], float)
