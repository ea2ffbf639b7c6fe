"""Exception types shared across the engines and the CLI."""
from __future__ import annotations


class ConfigError(ValueError):
    """Invalid configuration: bad key, bad value, or inconsistent combination."""


class NumericalError(RuntimeError):
    """A numerical procedure failed to produce a usable result."""


class DegenerateRegressionError(NumericalError):
    """Normal equations could not be solved for a block or date."""

    def __init__(self, message: str, block: int | None = None) -> None:
        super().__init__(message)
        self.block = block


class PsorConvergenceError(NumericalError):
    """Projected SOR failed to converge within the iteration budget."""

    def __init__(self, message: str, step: int | None = None) -> None:
        super().__init__(message)
        self.step = step
