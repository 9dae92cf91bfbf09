"""Exception types shared across the package."""


class OmringError(Exception):
    """Base class for all omring-specific errors."""


class ConfigError(OmringError):
    """Invalid, unknown, or missing configuration input."""


class UnstableSystemError(OmringError):
    """The drift matrix has an eigenvalue with non-positive real part."""


class ResonantSingularityError(OmringError):
    """The response matrix is singular, or numerically so, at a probe frequency."""

    def __init__(self, omega, condition=None):
        self.omega = float(omega)
        self.condition = condition
        msg = f"response matrix singular at omega = {self.omega:.17g}"
        if condition is not None:
            msg += f" (condition estimate {condition:.3e})"
        super().__init__(msg)


class EigenSolverError(OmringError):
    """Eigenvalue iteration failed to converge; distinct from instability."""


class GridCoverageError(OmringError):
    """Frequency grid does not capture enough spectral weight for integration."""
