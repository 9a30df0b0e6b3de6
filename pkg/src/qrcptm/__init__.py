"""Pauli-transfer-matrix toolkit for quantum reservoir computing."""

from .capacity import CapacityReport, estimate_capacity, estimate_ipc, estimate_mc
from .channels import (
    EncodingFamily,
    Hamiltonian,
    amplitude_damping_kraus,
    amplitude_damping_ptm,
    derive_seed,
    hamiltonian_step_ptm,
    local_reset_encoding,
    reset_encoding_family,
    ry_arccos_rotation,
    sample_random_cptp,
    sample_sk_hamiltonian,
    unitary_encoding_family,
)
from .exceptions import DimensionError, DomainError, NumericalError, QrcError, SingularMatrixError
from .mrc import MrcParams, mrc_analytic_mc, mrc_esp_class, mrc_run
from .pauli import (
    BlockPTM,
    CoherenceState,
    KrausSet,
    PauliBasis,
    apply_ptm,
    choi_from_ptm,
    density_to_coherence,
    coherence_to_density,
    pauli_string,
    project_to_cptp,
    ptm_from_choi,
    ptm_from_kraus,
    ptm_from_unitary,
    validate_cptp,
)
from .reservoir import (
    EspReport,
    ReservoirSystem,
    Trajectory,
    coherence_subspace,
    effective_spectral_radius,
    esp_indicators,
    evolve,
    fixed_point,
    injectivity_probe,
    product_spectral_norm_curve,
    schur_stable_check,
    sk_reservoir,
    step,
    variance_decay,
)
from .sweep import SweepConfig, SweepGrid, kernel_smooth, run_sweep

__version__ = "0.1.0"
