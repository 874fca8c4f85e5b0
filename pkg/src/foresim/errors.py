"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2,
NumericalError (and subclasses) -> 3.
"""

from __future__ import annotations


class ForesimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ForesimError):
    """Invalid configuration, CLI usage, or out-of-range hyperparameters."""


class DataError(ForesimError):
    """Malformed, inconsistent, or insufficient input data."""


class NumericalError(ForesimError):
    """Numerical failure: divergence, NaN loss, rank deficiency."""


class ConvergenceError(NumericalError):
    """Optimiser failed to reach the required tolerance.

    Carries the final gradient norm so callers can report how far off the
    solve ended.
    """

    def __init__(self, message: str, gradient_norm: float):
        super().__init__(f"{message} (final gradient norm {gradient_norm:.3e})")
        self.gradient_norm = gradient_norm


class LeakageError(NumericalError):
    """The leakage audit observed a test-range read during a fit stage."""
