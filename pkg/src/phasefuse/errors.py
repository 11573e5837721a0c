# phasefuse/errors.py
"""Exception hierarchy shared across the package."""


class PhasefuseError(Exception):
    """Base class for all phasefuse errors."""


class ConfigurationError(PhasefuseError):
    """Invalid configuration value (bad interval, inconsistent sizes, ...)."""


class DegenerateInstanceError(PhasefuseError):
    """Problem instance is degenerate (zero channel, vanishing quadratic form)."""


class ConvergenceError(PhasefuseError):
    """Iterative solver exhausted its iteration budget.

    Carries the best iterate found so the caller can fall back gracefully.
    """

    def __init__(self, message, best_solution=None):
        super().__init__(message)
        self.best_solution = best_solution
