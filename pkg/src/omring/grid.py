"""Frequency grids for spectrum sweeps.

Grids are built from spans of offsets around a center frequency (normally
omega_m).  Offsets are measured either in units of kappa_0 or of the total
mechanical linewidth gamma_m, matching the two axis conventions used for
plotting.  Log-clustered spans concentrate points geometrically around the
span midpoint, which is how linewidth-narrow features sitting on a
kappa-wide background get resolved without millions of points.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError


class Spacing(Enum):
    LINEAR = "linear"
    LOG_CLUSTER = "log_cluster"


class GridUnits(Enum):
    KAPPA0 = "kappa0"
    GAMMA_M = "gamma_m"


#: Smallest log-cluster offset relative to the span half-width.
_LOG_INNER = 1e-9


@dataclass(frozen=True)
class GridSpan:
    """One contiguous block of grid points, offsets in grid units."""

    lo: float
    hi: float
    points: int
    spacing: Spacing = Spacing.LINEAR

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ConfigError(f"grid span needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.points < 2:
            raise ConfigError("grid span needs at least 2 points")

    def offsets(self) -> np.ndarray:
        if self.spacing is Spacing.LINEAR:
            return np.linspace(self.lo, self.hi, self.points)
        center = 0.5 * (self.lo + self.hi)
        half = 0.5 * (self.hi - self.lo)
        m = max((self.points - 1) // 2, 1)
        r = half * np.logspace(np.log10(_LOG_INNER), 0.0, m)
        return np.concatenate([center - r[::-1], [center], center + r])


@dataclass(frozen=True)
class FrequencyGrid:
    """Merged, strictly increasing probe frequencies around ``center``."""

    center: float
    spans: tuple[GridSpan, ...]
    units: GridUnits = GridUnits.KAPPA0

    def __post_init__(self):
        if not self.spans:
            raise ConfigError("frequency grid needs at least one span")

    def scale(self, gamma_m: float) -> float:
        """Offset unit in kappa_0: 1 or gamma_m."""
        if self.units is GridUnits.GAMMA_M:
            if gamma_m <= 0:
                raise ConfigError("gamma_m units need gamma_m > 0")
            return gamma_m
        return 1.0

    def omegas(self, gamma_m: float = 1.0) -> np.ndarray:
        """Materialize the grid: absolute frequencies, unique and ascending.

        Deduplication happens after shifting to absolute frequencies:
        distinct offsets from overlapping spans can collapse onto the same
        double once the center is added.
        """
        s = self.scale(gamma_m)
        offsets = np.concatenate([sp.offsets() for sp in self.spans])
        return np.unique(self.center + offsets * s)

    def normalize(self, omegas: np.ndarray, gamma_m: float = 1.0) -> np.ndarray:
        """Map absolute frequencies back to offsets in grid units."""
        return (np.asarray(omegas, dtype=float) - self.center) / self.scale(gamma_m)

    def describe(self) -> dict:
        """JSON-friendly description, for sidecar files."""
        return {
            "center": self.center,
            "units": self.units.value,
            "spans": [
                {"lo": sp.lo, "hi": sp.hi, "points": sp.points, "spacing": sp.spacing.value}
                for sp in self.spans
            ],
        }
