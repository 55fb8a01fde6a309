"""Transient synchronization in open quantum systems.

Simulation and analysis toolkit for dissipative harmonic-oscillator networks
(Gaussian moment dynamics) and two-spin models (Liouvillian spectral
dynamics), with a sliding-window Pearson synchronization indicator and
scenario-driven figure reproduction.
"""

__version__ = "0.1.0"

from .errors import (
    DefectiveSpectrum,
    DimensionMismatch,
    NegativeFrequency,
    NoDecayingModes,
    NonPositiveDefinite,
    NonPSDRateMatrixWarning,
    ParseError,
    QsyncError,
    UnstableIntegration,
    ValidationError,
)
from .gaussian import (
    BathConfig,
    HarmonicNetwork,
    ModeDissipation,
    MomentState,
    MomentTrajectory,
    NormalModes,
    detect_noiseless_modes,
    diagonalize,
    effective_couplings,
    evolve_moments,
    lindblad_coefficients,
    squeezed_vacuum,
)
from .liouville import (
    GapReport,
    LiouvilleTrajectory,
    OpenSystem,
    SpectralDecomposition,
    Superoperator,
    build_liouvillian,
    devectorize,
    evolve,
    evolve_expm,
    evolve_spectral,
    gap_from_eigenvalues,
    spectral_decompose,
    timescale_gap,
    vectorize,
)
from .spins import (
    DephasingPairModel,
    LocalBathMaster,
    OhmicBath,
    SpinPairModel,
    build_local_bath_me,
    dephasing_block,
    dephasing_pair_system,
    jw_modes,
    local_bath_rates,
    local_me_pair_system,
    ohmic_spectral_density,
    radiated_intensity,
)
from .sync import (
    Series,
    SweepResult,
    SyncReport,
    arnold_sweep,
    pearson,
    sync_onset,
    sync_report,
)

__all__ = [name for name in dir() if not name.startswith("_")]
