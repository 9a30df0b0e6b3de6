"""
Channels as Pauli transfer matrices
===================================

Building channels, pushing states through them and checking that they are
physical.
"""

import numpy as np

from qrcptm import pauli
from qrcptm.channels import amplitude_damping_ptm, random_kraus, sample_random_cptp
from qrcptm.pauli import apply_ptm, choi_from_ptm, density_to_coherence, ptm_from_kraus, validate_cptp

##############################################################################
# Coherence vectors
# -----------------
#
# A density matrix on N qubits is stored as its Pauli expansion without the
# identity component.  Pure states all sit on a sphere of radius
# sqrt(2^N - 1); mixed states are strictly inside it.

for n in (1, 2, 3):
    s = pauli.random_pure_state(n, n)
    rho = pauli.random_density(n, n)
    print(f"N={n}: pure norm {s.norm:.6f}, bound {np.sqrt(2**n - 1):.6f}, mixed norm {density_to_coherence(rho).norm:.6f}")

##############################################################################
# From Kraus operators to a PTM
# -----------------------------
#
# The first row of a trace-preserving PTM is (1, 0, ..., 0).  The rest of the
# first column is the influx ``b``, which vanishes exactly for unital
# channels.

ks = random_kraus(2, 3, seed=0)
ptm = ptm_from_kraus(ks)
rho = pauli.random_density(2, 5)
via_ptm = apply_ptm(ptm, density_to_coherence(rho)).r
via_kraus = density_to_coherence(ks.apply(rho)).r
print("PTM vs Kraus update:", np.abs(via_ptm - via_kraus).max())

damp = amplitude_damping_ptm(0.3)
print("amplitude damping b =", damp.b, " W diagonal =", np.diag(damp.W))

##############################################################################
# Physicality checks
# ------------------
#
# The Choi matrix of a CPTP map is positive semidefinite with unit trace.
# Random channels are drawn by projecting random matrices onto that set.

C = choi_from_ptm(ptm)
print("Choi trace", np.trace(C).real, " min eigenvalue", np.linalg.eigvalsh(C).min())
rand = sample_random_cptp(2, seed=3)
print(validate_cptp(rand))
