"""
Coherence influx and echo-state indicators
==========================================

Without influx a driven quantum reservoir never forgets its initial state.
With a reset encoding it does, at a rate set by the input-driven spectral
radius.
"""

import numpy as np

from qrcptm import pauli
from qrcptm.channels import hamiltonian_step_ptm, sample_sk_hamiltonian, unitary_encoding_family
from qrcptm.reservoir import (
    ReservoirSystem,
    effective_spectral_radius,
    esp_indicators,
    fit_log_slope,
    injectivity_probe,
    sk_reservoir,
)

rng = np.random.default_rng(0)
u = rng.uniform(-1, 1, 200)
s0, s1 = pauli.random_pure_state(2, rng), pauli.random_pure_state(2, rng)

##############################################################################
# Unitary dynamics with a unitary encoding
# ----------------------------------------
#
# Every step is an orthogonal map on coherence vectors, so the distance
# between two trajectories never changes and constant inputs cannot be told
# apart by the fixed points.

ham = sample_sk_hamiltonian(2, 1.0, 1.0, seed=1)
closed = ReservoirSystem(hamiltonian_step_ptm(ham), unitary_encoding_family(2))
rep = esp_indicators(closed, s0, s1, u)
print("closed system: I_ESP range", rep.i_esp.min(), rep.i_esp.max())
print("fixed-point separations", injectivity_probe(closed, [(0.1, 0.6), (-0.5, 0.2)]).separations)

##############################################################################
# Reset encoding
# --------------
#
# Resetting the input qubit before rotating it injects coherence.  The
# difference between trajectories now shrinks roughly like rho_eff^t.

sys = sk_reservoir(2, J_s=1.0, disorder_K=1.0, seed=1)
rep = esp_indicators(sys, s0, s1, u)
rho_eff = effective_spectral_radius(sys, u)
slope = fit_log_slope(rep.log_i_esp, log_input=True)
print(f"reset encoding: rho_eff {rho_eff:.4f}, fitted rate {np.exp(slope):.4f}")
print(f"I_ESP(200) {rep.i_esp[-1]:.3e}, I_NS(200) {rep.final_i_ns:.3e}")

for t in (0, 20, 50, 100, 200):
    print(f"  t={t:3d}  log I_ESP {rep.log_i_esp[t]:9.3f}  t*log rho_eff {t * np.log(rho_eff):9.3f}")
