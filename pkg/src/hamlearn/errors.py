"""Error classes shared across the package.

Input problems and numerical failures are kept distinguishable so the
command line layer can map them to distinct exit codes.
"""

__all__ = ["HamlearnError", "InputError", "ConfigError", "NumericalError", "IntegrationError"]


class HamlearnError(Exception):
    """Base class for package errors."""


class InputError(HamlearnError, ValueError):
    """Bad arguments: wrong shapes, unknown names, unsupported operations."""


class ConfigError(InputError):
    """A configuration file or config-derived value is invalid."""


class NumericalError(HamlearnError, RuntimeError):
    """A numerical routine failed (non-SPD solve, divergent iteration, ...)."""


class IntegrationError(NumericalError):
    """The ODE integrator could not reach the end of the time span."""
