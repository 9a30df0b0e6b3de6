"""Command-line entry point: ``python -m qrcptm <command>``.

Commands
--------
sweep    phase-diagram sweep over (J_s, K)
mc       memory / information processing capacity of one SK reservoir
mrc      capacity grid of the multiplicative scalar reservoir
esp      echo-state indicator traces of one SK reservoir
channel  build, validate and serialise a PTM

Every stochastic command requires ``--seed``.  ``--config FILE`` reads a
JSON object whose keys are the long option names (with underscores); flags
given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import capacity, channels, mrc, reservoir, serialization, sweep
from .exceptions import QrcError
from .pauli import BlockPTM, random_pure_state, validate_cptp


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise SystemExit(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise SystemExit(f"config {path} must hold a JSON object")
    return cfg


def _fill(args, defaults: dict):
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def _need_seed(args):
    if args.seed is None:
        raise SystemExit(f"{args.command}: --seed is required")


# --------------------------------------------------------------------------- commands


SWEEP_DEFAULTS = {
    "j_min": 1e-2,
    "j_max": 1e2,
    "k_min": 1e-2,
    "k_max_disorder": 1e2,
    "n_j": 12,
    "n_k": 12,
    "samples": 3,
    "n_qubits": 2,
    "input_qubits": [1],
    "dt": 1.0,
    "h": 1.0,
    "esp_length": 200,
    "window": 20,
    "mc_length": 100_000,
    "mc_washout": 10_000,
    "k_max": 30,
    "workers": 1,
}


WINDOW_PRESETS = {"short-window": 10, "long-window": 20}


def cmd_sweep(args):
    if args.preset and args.window is None:
        args.window = WINDOW_PRESETS[args.preset]
    _fill(args, SWEEP_DEFAULTS)
    _need_seed(args)
    cfg = sweep.SweepConfig(
        seed=args.seed,
        j_range=(args.j_min, args.j_max),
        k_range=(args.k_min, args.k_max_disorder),
        n_j=args.n_j,
        n_k=args.n_k,
        samples=args.samples,
        n_qubits=args.n_qubits,
        input_qubits=tuple(args.input_qubits),
        dt=args.dt,
        h=args.h,
        esp_length=args.esp_length,
        window=args.window,
        mc_length=args.mc_length,
        mc_washout=args.mc_washout,
        k_max=args.k_max,
        workers=args.workers,
        checkpoint=args.checkpoint,
    )

    def progress(done, total):
        if not args.quiet:
            print(f"\r{done}/{total}", end="", file=sys.stderr, flush=True)

    grid = sweep.run_sweep(cfg, progress)
    if not args.quiet:
        print(file=sys.stderr)
    if args.csv:
        sweep.export(grid, args.csv, "csv")
    if args.json:
        sweep.export(grid, args.json, "json")
    failed = sum(1 for r in grid.records if r["flags"].startswith("error"))
    print(f"{len(grid.records)} records, {failed} failed")


def _sk_system(args):
    return reservoir.sk_reservoir(args.n_qubits, args.J_s, args.K, args.seed, tuple(args.input_qubits), dt=args.dt, h=args.h)


SYSTEM_DEFAULTS = {"n_qubits": 2, "J_s": 1.0, "K": 1.0, "input_qubits": [1], "dt": 1.0, "h": 1.0}


def cmd_mc(args):
    _fill(args, dict(SYSTEM_DEFAULTS, length=100_000, washout=10_000, k_max=30, max_degree=0, max_delay=10, surrogates=0))
    _need_seed(args)
    sys_ = _sk_system(args)
    rng = np.random.default_rng(channels.derive_seed(args.seed, 1))
    u = rng.uniform(-1, 1, args.length)
    traj = reservoir.evolve(sys_, random_pure_state(sys_.n_qubits, rng), u)
    states = traj.states[1:]
    rep = capacity.estimate_mc(u, states, k_max=args.k_max, washout=args.washout, surrogates=args.surrogates, seed=args.seed)
    if args.max_degree and args.max_degree >= 1:
        ipc = capacity.estimate_ipc(u, states, args.max_degree, args.max_delay, washout=args.washout, surrogates=args.surrogates, seed=args.seed)
        rep.ipc_by_degree, rep.ipc_targets, rep.ipc_values = ipc.ipc_by_degree, ipc.ipc_targets, ipc.ipc_values
        rep.ipc_noise_floor = ipc.ipc_noise_floor
        rep.config = {"mc": rep.config, "ipc": ipc.config}
    if args.csv:
        capacity.write_capacity_csv(args.csv, rep)
    if args.json:
        capacity.write_capacity_json(args.json, rep)
    print(f"C_tot = {rep.mc_total:.6f}")
    for d, v in rep.ipc_by_degree.items():
        print(f"C_{d}^IPC = {v:.6f}")


def cmd_mrc(args):
    _fill(args, {"b": 0.5, "length": 100_000, "washout": None, "k_max": 10, "ipc_degree": 0})
    _need_seed(args)
    if args.preset == "dense-gain":
        a_values = [k / 99 for k in range(100)]
    elif args.a:
        a_values = args.a
    else:
        a_values = [0.1 * k for k in range(1, 10)]
    rows = []
    for i, a in enumerate(a_values):
        if a == 0:
            continue
        rows.append(
            mrc.mrc_capacity(a, args.b, n_samples=args.length, washout=args.washout, k_max=args.k_max, seed=channels.derive_seed(args.seed, i), ipc_degree=args.ipc_degree)
        )
    if args.csv:
        mrc.write_mrc_csv(args.csv, rows)
    for r in rows:
        print(f"a={r.a:.4f} b={r.b:.4f} C_tot={r.empirical_mc:.5f} analytic={r.analytic_mc:.5f} tail={r.tail_mc:.2e}")


def cmd_esp(args):
    _fill(args, dict(SYSTEM_DEFAULTS, length=200, window=20))
    _need_seed(args)
    sys_ = _sk_system(args)
    rng = np.random.default_rng(channels.derive_seed(args.seed, 1))
    u = rng.uniform(-1, 1, args.length)
    s0, s1 = random_pure_state(sys_.n_qubits, rng), random_pure_state(sys_.n_qubits, rng)
    rep = reservoir.esp_indicators(sys_, s0, s1, u, args.window)
    if args.csv:
        reservoir.write_trajectory_csv(args.csv, rep.trajectories[0], rep)
    if args.json:
        reservoir.write_esp_json(args.json, rep, sys_)
    rho_eff = reservoir.effective_spectral_radius(sys_, u)
    print(f"rho_eff = {rho_eff:.6f}")
    print(f"I_ESP(T) = {rep.i_esp[-1]:.6e}  I_NS(T) = {rep.i_ns[-1]:.6e}  variance decay = {rep.variance_decay[-1]:.4f}")


def cmd_channel(args):
    _fill(args, {"n_qubits": 1, "gamma": 1.0, "u": 1.0, "J_s": 1.0, "K": 1.0, "dt": 1.0, "h": 1.0})
    kind = args.kind
    if kind == "random-cptp":
        _need_seed(args)
        ptm = channels.sample_random_cptp(args.n_qubits, args.seed)
    elif kind == "amplitude-damping":
        ptm = channels.amplitude_damping_ptm(args.gamma)
    elif kind == "reset-encoding":
        ptm = channels.local_reset_encoding(args.u, [1], args.n_qubits)
    elif kind == "sk-step":
        _need_seed(args)
        ham = channels.sample_sk_hamiltonian(args.n_qubits, args.J_s, args.K, h=args.h, seed=args.seed)
        ptm = channels.hamiltonian_step_ptm(ham, args.dt)
    elif kind == "load":
        if not args.input:
            raise SystemExit("channel load: --input is required")
        ptm = serialization.load(args.input)
        if not isinstance(ptm, BlockPTM):
            raise SystemExit(f"{args.input} does not hold a PTM")
    else:
        raise SystemExit(f"unknown channel kind {kind!r}")
    rep = validate_cptp(ptm)
    print(
        f"n_qubits={ptm.n_qubits} cptp={rep.is_cptp} trace_residual={rep.trace_residual:.2e} "
        f"choi_min_eig={rep.choi_min_eigenvalue:.3e} rho(W)={rep.spectral_radius:.6f} "
        f"|b|={rep.influx_norm:.6f} unital={rep.unital}"
    )
    if args.json:
        serialization.save(ptm, args.json)


# --------------------------------------------------------------------------- parser


def _system_options(p):
    p.add_argument("--n-qubits", dest="n_qubits", type=int)
    p.add_argument("--J-s", dest="J_s", type=float, help="coupling scale")
    p.add_argument("--K", dest="K", type=float, help="disorder strength")
    p.add_argument("--input-qubits", dest="input_qubits", type=int, nargs="+")
    p.add_argument("--dt", type=float)
    p.add_argument("--h", type=float, help="uniform field")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrcptm", description="PTM reservoir diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--seed", type=int)
        p.add_argument("--csv")
        p.add_argument("--json")

    p = sub.add_parser("sweep", help="phase-diagram sweep")
    common(p)
    p.add_argument("--j-min", dest="j_min", type=float)
    p.add_argument("--j-max", dest="j_max", type=float)
    p.add_argument("--k-min", dest="k_min", type=float)
    p.add_argument("--k-max-disorder", dest="k_max_disorder", type=float)
    p.add_argument("--n-j", dest="n_j", type=int)
    p.add_argument("--n-k", dest="n_k", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--n-qubits", dest="n_qubits", type=int)
    p.add_argument("--input-qubits", dest="input_qubits", type=int, nargs="+")
    p.add_argument("--dt", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--esp-length", dest="esp_length", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--preset", choices=sorted(WINDOW_PRESETS), help="indicator window preset; --window overrides it")
    p.add_argument("--mc-length", dest="mc_length", type=int)
    p.add_argument("--mc-washout", dest="mc_washout", type=int)
    p.add_argument("--k-max", dest="k_max", type=int, help="largest memory delay")
    p.add_argument("--workers", type=int)
    p.add_argument("--checkpoint")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mc", help="capacity of one SK reservoir")
    common(p)
    _system_options(p)
    p.add_argument("--length", type=int)
    p.add_argument("--washout", type=int)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--max-degree", dest="max_degree", type=int)
    p.add_argument("--max-delay", dest="max_delay", type=int)
    p.add_argument("--surrogates", type=int)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("mrc", help="multiplicative scalar reservoir capacities")
    common(p)
    p.add_argument("--a", type=float, nargs="+")
    p.add_argument("--b", type=float)
    p.add_argument("--preset", choices=["dense-gain"], help="a = k/99 for k = 1..99")
    p.add_argument("--length", type=int)
    p.add_argument("--washout", type=int)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--ipc-degree", dest="ipc_degree", type=int)
    p.set_defaults(func=cmd_mrc)

    p = sub.add_parser("esp", help="echo-state indicators of one SK reservoir")
    common(p)
    _system_options(p)
    p.add_argument("--length", type=int)
    p.add_argument("--window", type=int)
    p.set_defaults(func=cmd_esp)

    p = sub.add_parser("channel", help="build, validate and serialise a PTM")
    common(p)
    p.add_argument("kind", choices=["random-cptp", "amplitude-damping", "reset-encoding", "sk-step", "load"])
    p.add_argument("--n-qubits", dest="n_qubits", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--u", type=float)
    p.add_argument("--J-s", dest="J_s", type=float)
    p.add_argument("--K", dest="K", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--input")
    p.set_defaults(func=cmd_channel)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = _load_config(args.config)
    for key, value in cfg.items():
        if key in ("command", "func", "config"):
            continue
        if not hasattr(args, key):
            parser.error(f"unknown config key {key!r} for command {args.command}")
        if getattr(args, key) is None:
            setattr(args, key, value)
    try:
        args.func(args)
    except QrcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
