"""Exception types shared across the package."""


class DyndegError(Exception):
    """Base class for errors raised by this package."""


class AmbientMismatchError(DyndegError):
    """Two classes live over different prime trees or base lattices."""


class InvalidModelError(DyndegError):
    """A prime set is not a parent-closed subset of its tree."""


class ConfigurationError(DyndegError):
    """A required piece of configuration (e.g. canonical class) is missing."""


class DominanceError(DyndegError):
    """A map is degenerate (zero determinant / zero image)."""


class NotHolomorphicError(DyndegError):
    """A fan pair does not satisfy the cone-mapping condition."""


class CapacityError(DyndegError):
    """A resource cap was exceeded.  Carries partial results."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial if partial is not None else []


class DegeneracyError(DyndegError):
    """Composition collapsed to the zero map."""


class HeuristicFailureError(DyndegError):
    """A randomized heuristic failed after its retry budget."""


class NumericalFailureError(DyndegError):
    """An iterative numerical routine failed to converge."""


class InsufficientDataError(DyndegError):
    """Not enough terms in a sequence for the requested analysis."""
