"""Exception types shared across the package."""


class LevelsweepError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(LevelsweepError):
    """Invalid grid, case or scheme configuration."""


class AssemblyError(LevelsweepError):
    """A stencil reached outside the available ghost layer."""


class SolverError(LevelsweepError):
    """The sweeping solver hit a structural problem (e.g. zero diagonal)."""


class OracleError(LevelsweepError):
    """The dense reference solver could not be applied."""


class DegenerateSymbolError(LevelsweepError):
    """The implicit symbol of a frozen stencil vanished at some frequency."""

    def __init__(self, message, courant=None, theta=None):
        super().__init__(message)
        self.courant = courant
        self.theta = theta


class DivergenceError(LevelsweepError):
    """A solve produced non-finite values; carries a diagnostic snapshot path."""

    def __init__(self, message, snapshot_path=None):
        super().__init__(message)
        self.snapshot_path = snapshot_path
