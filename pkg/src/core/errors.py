"""Exception types raised by the simulator.

Config and data problems are ValueErrors, solver problems are RuntimeErrors,
so callers that only know the builtins still catch them.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Configuration document is missing keys or holds non-physical values."""


class DataFileError(ValueError):
    """A supplied data file could not be parsed."""


class SolverError(RuntimeError):
    """Base class for numerical failures."""


class SingularSystemError(SolverError):
    pass


class UndefinedBasisError(SolverError):
    """Normal-mode basis requested where both control fields vanish."""


class ConvergenceError(SolverError):
    pass


class ResolutionError(SolverError):
    """Grid too coarse for the requested pulse or medium."""


class PerturbativeRegimeError(SolverError):
    """Coherences grew beyond the weak-probe regime."""


class QualityGateError(SolverError):
    pass
