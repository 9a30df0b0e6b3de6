import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrcptm import channels, pauli
from qrcptm.channels import (
    Hamiltonian,
    amplitude_damping_kraus,
    amplitude_damping_ptm,
    hamiltonian_step_ptm,
    local_reset_encoding,
    reset_encoding_family,
    ry_arccos_rotation,
    sample_random_cptp,
    sample_sk_hamiltonian,
    unitary_encoding_family,
)
from qrcptm.exceptions import DomainError
from qrcptm.pauli import apply_ptm, density_to_coherence, ptm_from_kraus, validate_cptp

def test_amplitude_damping_examples():
    np.testing.assert_allclose(amplitude_damping_ptm(0.0).matrix, np.eye(4))
    full = amplitude_damping_ptm(1.0)
    assert not full.W.any()
    np.testing.assert_allclose(full.b, [0, 0, 1])
    np.testing.assert_allclose(amplitude_damping_ptm(0.36).matrix, ptm_from_kraus(amplitude_damping_kraus(0.36)).matrix, atol=1e-14)


def test_amplitude_damping_domain():
    with pytest.raises(DomainError):
        amplitude_damping_ptm(1.5)


def test_ry_rotation_examples():
    np.testing.assert_allclose(ry_arccos_rotation(1.0).matrix, np.eye(4), atol=1e-15)
    R = ry_arccos_rotation(-1.0)
    # conjugation of X, Y, Z by R_y(pi)
    U = np.array([[0, -1], [1, 0]], dtype=complex)
    for i, P in enumerate(pauli.SIGMA[1:]):
        img = density_to_coherence(0.5 * (np.eye(2) + U @ P @ U.conj().T))
        np.testing.assert_allclose(R.W[:, i], img.r, atol=1e-14)
    np.testing.assert_allclose(np.diag(R.W), [-1, 1, -1], atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1, 1), st.integers(1, 3))
def test_ry_rotation_is_orthogonal(u, n):
    R = ry_arccos_rotation(u, target=1, n_qubits=n)
    np.testing.assert_allclose(R.W.T @ R.W, np.eye(R.dim), atol=1e-12)
    assert np.abs(R.b).max() < 1e-15


def test_ry_rotation_rejects_out_of_domain():
    with pytest.raises(DomainError):
        ry_arccos_rotation(1.0000001)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1, 1))
def test_unitary_family_matches_direct_rotation(u):
    fam = unitary_encoding_family(2, (1, 2))
    direct = ry_arccos_rotation(u, 1, 2) @ ry_arccos_rotation(u, 2, 2)
    np.testing.assert_allclose(fam(u).matrix, direct.matrix, atol=1e-13)
    assert not fam(u).b.any()


def test_local_reset_encoding_examples():
    np.testing.assert_allclose(local_reset_encoding(1.0, [1], 1).matrix, amplitude_damping_ptm(1.0).matrix, atol=1e-15)
    for u in (-1.0, -0.3, 0.4, 1.0):
        assert local_reset_encoding(u, [1], 2).spectral_norm == pytest.approx(np.sqrt(2), abs=1e-12)
        assert local_reset_encoding(u, [1, 2], 3).spectral_norm == pytest.approx(2.0, abs=1e-12)


def test_local_reset_encoding_rejects_bad_qubits():
    with pytest.raises(DomainError):
        local_reset_encoding(0.1, [], 2)
    with pytest.raises(DomainError):
        local_reset_encoding(0.1, [3], 2)


@settings(max_examples=30, deadline=None)
@given(st.floats(-1, 1), st.integers(0, 2**32 - 1))
def test_reset_family_matches_direct_construction(u, seed):
    fam = reset_encoding_family(3, (1, 3))
    direct = local_reset_encoding(u, (1, 3), 3)
    np.testing.assert_allclose(fam(u).matrix, direct.matrix, atol=1e-13)
    np.testing.assert_allclose(fam(u).matrix, (fam.rotation(u) @ fam.reset).matrix, atol=1e-13)


def test_reset_erases_input_qubit():
    rng = np.random.default_rng(0)
    enc = local_reset_encoding(0.37, [1], 2)
    a = apply_ptm(enc, pauli.random_pure_state(2, rng))
    b = apply_ptm(enc, pauli.random_pure_state(2, rng))
    # reduced state of qubit 1: components sigma_k (x) I, indices k = 1, 2, 3
    np.testing.assert_allclose(a.r[:3], b.r[:3], atol=1e-14)
    assert not np.allclose(a.r, b.r)


def test_hamiltonian_step_examples():
    zero = Hamiltonian(2, np.zeros((4, 4)))
    np.testing.assert_allclose(hamiltonian_step_ptm(zero).matrix, np.eye(16), atol=1e-15)
    half_z = Hamiltonian(1, np.diag([0.5, -0.5]))
    np.testing.assert_allclose(hamiltonian_step_ptm(half_z, np.pi).W, np.diag([-1.0, -1.0, 1.0]), atol=1e-14)


def test_hamiltonian_step_is_orthogonal():
    ham = sample_sk_hamiltonian(2, 1.3, 0.7, seed=5)
    W = hamiltonian_step_ptm(ham, 0.8).W
    np.testing.assert_allclose(W.T @ W, np.eye(15), atol=1e-10)
    assert abs(abs(np.linalg.det(W)) - 1) < 1e-9
    np.testing.assert_allclose(np.abs(np.linalg.eigvals(W)), 1, atol=1e-9)


def test_hamiltonian_validation():
    with pytest.raises(DomainError):
        Hamiltonian(1, np.array([[0, 1], [0, 0]]))
    with pytest.raises(DomainError):
        hamiltonian_step_ptm(Hamiltonian(1, np.eye(2)), 0.0)


def test_sk_hamiltonian_matches_explicit_sum():
    ham = sample_sk_hamiltonian(3, 2.0, 0.5, h=0.7, seed=1)
    J = np.array(ham.params["couplings"])
    D = np.array(ham.params["disorder"])
    X = pauli.SIGMA[1]
    Z = pauli.SIGMA[3]
    I = np.eye(2)

    def op(single, q):
        mats = [single if k == q else I for k in range(3)]
        return np.kron(np.kron(mats[0], mats[1]), mats[2])

    H = sum(J[i, j] * op(X, i) @ op(X, j) for i in range(3) for j in range(i))
    H = H + 0.5 * sum((0.7 + D[i]) * op(Z, i) for i in range(3))
    np.testing.assert_allclose(ham.H, H, atol=1e-14)


def test_sk_small_coupling_limit():
    ham = sample_sk_hamiltonian(2, 1e-12, 1.0, h=1.0, seed=3)
    field = 0.5 * (np.kron(pauli.SIGMA[3], np.eye(2)) + np.kron(np.eye(2), pauli.SIGMA[3]))
    np.testing.assert_allclose(ham.H, field, atol=1e-11)


def test_sk_sampling_deterministic():
    a = sample_sk_hamiltonian(2, 1.0, 1.0, seed=42)
    b = sample_sk_hamiltonian(2, 1.0, 1.0, seed=42)
    assert a.H.tobytes() == b.H.tobytes()
    assert a.params == b.params


def test_sk_coupling_distribution():
    draws = np.array([sample_sk_hamiltonian(2, 3.0, 0.0, seed=s).params["couplings"][1][0] for s in range(10_000)])
    assert np.abs(draws).max() <= 1.5
    sigma = 3.0 / np.sqrt(12)
    assert abs(draws.mean()) <= 3 * sigma / np.sqrt(draws.size)


def test_sk_sampling_domain():
    with pytest.raises(DomainError):
        sample_sk_hamiltonian(2, 0.0, 1.0)
    with pytest.raises(DomainError):
        sample_sk_hamiltonian(2, 1.0, -1.0)


@pytest.mark.parametrize("seed", range(5))
def test_random_cptp_is_valid_and_reproducible(seed):
    ptm = sample_random_cptp(2, seed)
    rep = validate_cptp(ptm)
    assert rep.is_cptp
    assert rep.spectral_radius <= 1 + 1e-9
    assert sample_random_cptp(2, seed).matrix.tobytes() == ptm.matrix.tobytes()


def test_derive_seed_is_stable_and_distinct():
    assert channels.derive_seed(1, 2, 3) == channels.derive_seed(1, 2, 3)
    seeds = {channels.derive_seed(1, i, j) for i in range(20) for j in range(20)}
    assert len(seeds) == 400
