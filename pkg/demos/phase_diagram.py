"""
A small phase diagram
=====================

Sweep the SK coupling scale J_s and disorder K on a coarse log grid, smooth
the per-cell spectral radius and compare the indicator with rho_eff.
"""

import sys

import numpy as np

from qrcptm.sweep import SweepConfig, export, finite_column, run_sweep, smooth_metric

cfg = SweepConfig(seed=7, n_j=6, n_k=6, samples=2, mc_length=20_000, mc_washout=2_000, k_max=10)
grid = run_sweep(cfg, progress=lambda d, t: print(f"\r{d}/{t}", end="", file=sys.stderr))
print(file=sys.stderr)

##############################################################################
# Smoothed spectral radius
# ------------------------
#
# Rows are K (small at the top), columns are J_s (small on the left).

rho, excluded = smooth_metric(grid, "rho_W")
print("       " + " ".join(f"{j:7.2g}" for j in cfg.j_values))
for K, row in zip(cfg.k_values, rho):
    print(f"{K:7.2g}" + " ".join(f"{v:7.3f}" for v in row))

##############################################################################
# Indicator against rho_eff
# -------------------------

recs = [r for r in grid.records if not r["flags"] and r["rho_eff"] > 0]
x = np.log(finite_column(recs, "rho_eff"))
y = finite_column(recs, "log_i_ns_final")
print("corr(log I_NS, log rho_eff) =", np.corrcoef(x, y)[0, 1])

export(grid, "phase_diagram.csv")
print("records written to phase_diagram.csv")
