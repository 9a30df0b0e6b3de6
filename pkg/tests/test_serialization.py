import json

import numpy as np
import pytest

from qrcptm import pauli, serialization
from qrcptm.channels import random_kraus, sample_random_cptp, sample_sk_hamiltonian
from qrcptm.exceptions import DomainError


def test_ptm_round_trip_is_bit_exact():
    ptm = sample_random_cptp(2, 3)
    back = serialization.loads(serialization.dumps(ptm))
    assert back.matrix.tobytes() == ptm.matrix.tobytes()
    assert back.n_qubits == 2


def test_kraus_round_trip_interleaves_complex_parts():
    ks = random_kraus(1, 2, 0)
    d = serialization.to_dict(ks)
    K0 = ks.operators[0]
    assert d["operators"][0]["data"][:2] == [K0[0, 0].real, K0[0, 0].imag]
    back = serialization.from_dict(json.loads(json.dumps(d)))
    for a, b in zip(ks.operators, back.operators):
        assert a.tobytes() == b.tobytes()


def test_state_and_hamiltonian_round_trip(tmp_path):
    s = pauli.random_pure_state(3, 1)
    serialization.save(s, tmp_path / "s.json")
    assert serialization.load(tmp_path / "s.json").r.tobytes() == s.r.tobytes()
    ham = sample_sk_hamiltonian(2, 1.0, 0.5, seed=7)
    back = serialization.loads(serialization.dumps(ham))
    assert back.H.tobytes() == ham.H.tobytes()
    assert back.params == json.loads(json.dumps(ham.params))


def test_row_major_layout():
    W = np.arange(9.0).reshape(3, 3)
    d = serialization.to_dict(pauli.BlockPTM(1, np.zeros(3), W))
    assert d["W"]["shape"] == [3, 3]
    assert d["W"]["data"] == list(range(9))


def test_rejects_foreign_payloads():
    d = serialization.to_dict(sample_random_cptp(1, 0))
    with pytest.raises(DomainError):
        serialization.from_dict(dict(d, normalization="other"))
    with pytest.raises(DomainError):
        serialization.from_dict(dict(d, type="tensor"))
    with pytest.raises(DomainError):
        serialization.to_dict(np.eye(2))


def test_load_error_names_path(tmp_path):
    with pytest.raises(OSError, match="nothing.json"):
        serialization.load(tmp_path / "nothing.json")
