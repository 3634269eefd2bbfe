"""mrqm: design and simulation toolkit for a switchable multiresonator memory."""

from .model import (
    GaussianPulse,
    MemoryConfig,
    SwitchSchedule,
    SymmetryError,
    load_config_file,
    make_case,
    validate,
)
from .spectral import (
    PoleError,
    SpectralCurve,
    chi,
    efficiency_spectrum,
    noise_gain,
    phase_delay,
    s11_lossless,
    transfer_s,
    transfer_s_rational,
)
from .eigen import (
    EigenReport,
    IncommensurateError,
    MergeScan,
    char_poly_storage,
    dynamical_matrix,
    eigenfreqs,
    multiplet_base,
    revival_period,
    scan_merge,
    storage_roots,
)
from .optimize import (
    DesignReport,
    PlateauMetrics,
    design,
    kappa_closed_form,
    solve_f,
    solve_kappa,
    verify_plateau,
)
from .dynamics import (
    EchoMetrics,
    EnergyLedger,
    RetrievalMetrics,
    SimulationResult,
    echo_metrics,
    find_switch_time,
    flux_balance_residual,
    freq_domain_output,
    integrate,
    store_retrieve,
)

__version__ = "0.1.0"

__all__ = [
    "GaussianPulse",
    "MemoryConfig",
    "SwitchSchedule",
    "SymmetryError",
    "load_config_file",
    "make_case",
    "validate",
    "PoleError",
    "SpectralCurve",
    "chi",
    "efficiency_spectrum",
    "noise_gain",
    "phase_delay",
    "s11_lossless",
    "transfer_s",
    "transfer_s_rational",
    "EigenReport",
    "IncommensurateError",
    "MergeScan",
    "char_poly_storage",
    "dynamical_matrix",
    "eigenfreqs",
    "multiplet_base",
    "revival_period",
    "scan_merge",
    "storage_roots",
    "DesignReport",
    "PlateauMetrics",
    "design",
    "kappa_closed_form",
    "solve_f",
    "solve_kappa",
    "verify_plateau",
    "EchoMetrics",
    "EnergyLedger",
    "RetrievalMetrics",
    "SimulationResult",
    "echo_metrics",
    "find_switch_time",
    "flux_balance_residual",
    "freq_domain_output",
    "integrate",
    "store_retrieve",
    "__version__",
]
