"""JSON round trips for channels, states and Hamiltonians.

Arrays are stored row-major as flat lists next to their shape.  Complex
arrays are stored with real and imaginary parts interleaved.  Every payload
carries the PTM normalisation tag so files written under a different
convention are rejected rather than silently misread.
"""

from __future__ import annotations

import json

import numpy as np

from .channels import Hamiltonian
from .exceptions import DomainError
from .pauli import NORMALIZATION_VERSION, BlockPTM, CoherenceState, KrausSet


def _real(a) -> dict:
    a = np.asarray(a, float)
    return {"shape": list(a.shape), "data": a.ravel(order="C").tolist()}


def _complex(a) -> dict:
    a = np.asarray(a, complex)
    flat = np.empty(2 * a.size)
    flat[0::2] = a.real.ravel(order="C")
    flat[1::2] = a.imag.ravel(order="C")
    return {"shape": list(a.shape), "data": flat.tolist()}


def _read_real(d) -> np.ndarray:
    return np.asarray(d["data"], float).reshape(d["shape"])


def _read_complex(d) -> np.ndarray:
    flat = np.asarray(d["data"], float)
    return (flat[0::2] + 1j * flat[1::2]).reshape(d["shape"])


def _check(d, kind):
    if d.get("type") != kind:
        raise DomainError(f"expected a {kind} payload, got {d.get('type')!r}")
    if d.get("normalization") != NORMALIZATION_VERSION:
        raise DomainError(f"payload uses normalisation {d.get('normalization')!r}, expected {NORMALIZATION_VERSION!r}")


def ptm_to_dict(ptm: BlockPTM) -> dict:
    return {"type": "ptm", "normalization": NORMALIZATION_VERSION, "n_qubits": ptm.n_qubits, "b": _real(ptm.b), "W": _real(ptm.W)}


def ptm_from_dict(d: dict) -> BlockPTM:
    _check(d, "ptm")
    return BlockPTM(int(d["n_qubits"]), _read_real(d["b"]), _read_real(d["W"]))


def kraus_to_dict(ks: KrausSet) -> dict:
    return {
        "type": "kraus",
        "normalization": NORMALIZATION_VERSION,
        "n_qubits": ks.n_qubits,
        "operators": [_complex(K) for K in ks.operators],
    }


def kraus_from_dict(d: dict) -> KrausSet:
    _check(d, "kraus")
    return KrausSet(tuple(_read_complex(K) for K in d["operators"]))


def state_to_dict(s: CoherenceState) -> dict:
    return {"type": "coherence-state", "normalization": NORMALIZATION_VERSION, "n_qubits": s.n_qubits, "r": _real(s.r)}


def state_from_dict(d: dict) -> CoherenceState:
    _check(d, "coherence-state")
    return CoherenceState(int(d["n_qubits"]), _read_real(d["r"]))


def hamiltonian_to_dict(ham: Hamiltonian) -> dict:
    return {
        "type": "hamiltonian",
        "normalization": NORMALIZATION_VERSION,
        "n_qubits": ham.n_qubits,
        "H": _complex(ham.H),
        "params": ham.params,
    }


def hamiltonian_from_dict(d: dict) -> Hamiltonian:
    _check(d, "hamiltonian")
    return Hamiltonian(int(d["n_qubits"]), _read_complex(d["H"]), dict(d.get("params", {})))


_WRITERS = {BlockPTM: ptm_to_dict, KrausSet: kraus_to_dict, CoherenceState: state_to_dict, Hamiltonian: hamiltonian_to_dict}
_READERS = {"ptm": ptm_from_dict, "kraus": kraus_from_dict, "coherence-state": state_from_dict, "hamiltonian": hamiltonian_from_dict}


def to_dict(obj) -> dict:
    for cls, fn in _WRITERS.items():
        if isinstance(obj, cls):
            return fn(obj)
    raise DomainError(f"cannot serialise {type(obj).__name__}")


def from_dict(d: dict):
    try:
        reader = _READERS[d["type"]]
    except KeyError:
        raise DomainError(f"unknown payload type {d.get('type')!r}") from None
    return reader(d)


def dumps(obj) -> str:
    return json.dumps(to_dict(obj))


def loads(text: str):
    return from_dict(json.loads(text))


def save(obj, path) -> None:
    try:
        with open(path, "w") as fh:
            json.dump(to_dict(obj), fh)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def load(path):
    try:
        with open(path) as fh:
            return from_dict(json.load(fh))
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
