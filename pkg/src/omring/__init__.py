"""Deterministic simulator of nonreciprocal light transmission and
thermal-noise interference in a ring optomechanical system.

A whispering-gallery resonator with two counter-propagating optical modes
couples to a pair of mechanical resonators that share a common thermal
reservoir.  The package assembles the linearized drift dynamics, solves
the frequency-domain response, and evaluates transmission, reflection,
thermal and vacuum noise spectra, including the destructive interference
between the two thermal-noise flow paths that lets the device isolate (or
amplify) at the single-photon level without ground-state cooling.
"""

from .dynamics import (Basis, DriftSystem, StabilityReport, build_bare,
                       build_supermode, check_stability)
from .errors import (ConfigError, EigenSolverError, GridCoverageError,
                     OmringError, ResonantSingularityError, UnstableSystemError)
from .grid import FrequencyGrid, GridSpan, GridUnits, Spacing
from .params import (DERIVED, BareSteadyState, ChannelId, NoiseChannel,
                     PhysicalConfig, derive_g_l, load_config,
                     parse_config_text, steady_state, thermal_occupation)
from .presets import PRESETS, Preset, get_preset
from .spectra import (SpectraBundle, SpectraPoint, Susceptibility,
                      compose_output, evaluate_point, isolation_db,
                      reflection, supermode_thermal, susceptibility, sweep,
                      thermal_spectrum, transmission, vacuum_spectrum)
from .verify import (CovarianceReport, DiffusionMatrix, basis_consistency,
                     diffusion_matrix, limit_check_single_mode,
                     lyapunov_covariance, occupation_spectrum, parseval_check)

__version__ = "0.1.0"

__all__ = [
    "Basis", "DriftSystem", "StabilityReport", "build_bare", "build_supermode",
    "check_stability",
    "ConfigError", "EigenSolverError", "GridCoverageError", "OmringError",
    "ResonantSingularityError", "UnstableSystemError",
    "FrequencyGrid", "GridSpan", "GridUnits", "Spacing",
    "DERIVED", "BareSteadyState", "ChannelId", "NoiseChannel", "PhysicalConfig",
    "derive_g_l", "load_config", "parse_config_text", "steady_state",
    "thermal_occupation",
    "PRESETS", "Preset", "get_preset",
    "SpectraBundle", "SpectraPoint", "Susceptibility", "compose_output",
    "evaluate_point", "isolation_db", "reflection", "supermode_thermal",
    "susceptibility", "sweep", "thermal_spectrum", "transmission",
    "vacuum_spectrum",
    "CovarianceReport", "DiffusionMatrix", "basis_consistency",
    "diffusion_matrix", "limit_check_single_mode", "lyapunov_covariance",
    "occupation_spectrum", "parseval_check",
    "__version__",
]
