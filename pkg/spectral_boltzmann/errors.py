"""
Exception hierarchy for the spectral Boltzmann solver.

Library code raises these; the CLI and the HTTP service translate them into
exit codes and HTTP errors.
"""

from typing import Optional


class SpectralBoltzmannError(Exception):
    """Base class for all errors raised by this package."""


class GridError(SpectralBoltzmannError, ValueError):
    """Invalid grid parameters or a field that does not match its grid."""


class ParameterError(SpectralBoltzmannError, ValueError):
    """Invalid model parameters."""


class ConfigError(SpectralBoltzmannError, ValueError):
    """A run configuration could not be loaded or validated."""


class FieldFileError(SpectralBoltzmannError, ValueError):
    """A binary field file is malformed."""


class FieldError(SpectralBoltzmannError, ValueError):
    """Field data is not finite."""


class QuadratureError(SpectralBoltzmannError, RuntimeError):
    """A quadrature did not reach its tolerance.

    Args:
        message (str): Human readable description
        estimate (float): Achieved error estimate
        value (Optional[complex]): Last computed value, if any
    """

    def __init__(self, message: str, estimate: float, value: Optional[complex] = None):
        super().__init__(f"{message} (achieved error estimate {estimate:.3e})")
        self.estimate = estimate
        self.value = value


class ProjectionError(SpectralBoltzmannError, RuntimeError):
    """The conservation constraints are degenerate on the grid."""


class EvolutionError(SpectralBoltzmannError, RuntimeError):
    """The time integration produced a non-finite state."""

    def __init__(self, message: str, step_index: int):
        super().__init__(f"{message} at step {step_index}")
        self.step_index = step_index
