"""Krylov spread complexity for kicked quantum maps."""

from .floquet import (
    DimerParams,
    DriveParams,
    FloquetOperator,
    build_dimer_floquet,
    build_kicked_ising,
    build_self_dual,
    evolve,
    hermitian_expm,
)
from .krylov import amplitudes_chain, amplitudes_direct, arnoldi, highfreq_comparison, lanczos
from .observables import (
    dispersion,
    magnetization_series,
    rescale,
    saturation_value,
    slope_fit,
    spread_complexity,
    spread_entropy,
)
from .spectral import eta, quasienergies, r_statistic, spacing_histogram, spectral_stats
from .statespace import (
    Operator,
    SectorBasis,
    SpinBasis,
    angular_momentum_operators,
    parity_sector,
    pauli_site_operator,
    project_operator,
    total_spin_operator,
)

__version__ = "0.1.0"
