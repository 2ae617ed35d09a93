"""Exception types shared across the package."""


class MarketError(Exception):
    """Base class for all package-specific errors."""


class DomainError(MarketError, ValueError):
    """An argument lies outside its mathematical domain."""


class ModelError(MarketError, ValueError):
    """Inputs violate a model precondition or invariant."""


class FitError(ModelError):
    """A data fit cannot be performed or produced an invalid model."""


class NonConvergenceError(MarketError, RuntimeError):
    """An iterative solver exhausted its budget where convergence was required.

    ``path`` carries the iterates visited before giving up, so callers can
    still report or export the partial trajectory.
    """

    def __init__(self, message: str, path=()):
        super().__init__(message)
        self.path = tuple(path)


class ScenarioError(MarketError, ValueError):
    """A scenario file or a data file it references is malformed."""
