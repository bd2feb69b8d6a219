"""Golden-rule charge-transfer rates for displaced harmonic models.

Cavity-free and cavity-modified nonequilibrium rate coefficients,
equilibrium and instantaneous-Gaussian limits, population dynamics, a
photon-frequency optimizer, and a Fock-space brute-force oracle.
"""

__version__ = "0.1.0"

from .bath import BathStabilityError, DiscreteBath, GOASpec, discretize_ohmic
from .bath import goa_to_normal_modes
from .correlators import (
    CorrelatorOverflowError,
    coupling_alpha,
    equilibrium_corr,
    imt_gap_mean,
    imt_gap_variance,
    mean_photon_number,
    nuclear_corr,
    photon_factor,
)
from .dynamics import PopulationTrajectory, extend_with_plateau, propagate
from .model import (
    HBAR_MEV_FS,
    KB_MEV_PER_K,
    CavityMode,
    DisplacedHarmonicModel,
    Direction,
    ModelFormatError,
    ThermalEnv,
    load_model,
    reorganization_energy,
    save_model,
)
from .optimizer import OptimizationResult, optimize_omega_p
from .oracle import (
    FockConfig,
    OracleConvergenceError,
    OracleDomainError,
    fock_corr_grid,
    fock_nuclear_corr,
    oracle_rate,
)
from .rates import (
    VARIANTS,
    ConvergenceError,
    RateSeries,
    TimeGrid,
    efgr,
    imt,
    imt_cavity,
    lt_imt,
    marcus_rate,
    nefgr_cavity,
    nefgr_cavity_direct,
    nefgr_dressed,
    nefgr_free,
)

__all__ = [
    "__version__",
    "HBAR_MEV_FS",
    "KB_MEV_PER_K",
    "VARIANTS",
    "BathStabilityError",
    "CavityMode",
    "ConvergenceError",
    "CorrelatorOverflowError",
    "DiscreteBath",
    "Direction",
    "DisplacedHarmonicModel",
    "FockConfig",
    "GOASpec",
    "ModelFormatError",
    "OptimizationResult",
    "OracleConvergenceError",
    "OracleDomainError",
    "PopulationTrajectory",
    "RateSeries",
    "ThermalEnv",
    "TimeGrid",
    "coupling_alpha",
    "discretize_ohmic",
    "efgr",
    "equilibrium_corr",
    "extend_with_plateau",
    "fock_corr_grid",
    "fock_nuclear_corr",
    "goa_to_normal_modes",
    "imt",
    "imt_cavity",
    "imt_gap_mean",
    "imt_gap_variance",
    "load_model",
    "lt_imt",
    "marcus_rate",
    "mean_photon_number",
    "nefgr_cavity",
    "nefgr_cavity_direct",
    "nefgr_dressed",
    "nefgr_free",
    "nuclear_corr",
    "optimize_omega_p",
    "oracle_rate",
    "photon_factor",
    "propagate",
    "reorganization_energy",
    "save_model",
]
