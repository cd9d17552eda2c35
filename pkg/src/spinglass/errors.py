"""Exception hierarchy shared by every module."""


class SpinGlassError(Exception):
    """Base class for errors raised by this package."""


class InvalidArgumentError(SpinGlassError, ValueError):
    """An argument is outside the documented domain of an operation."""


class DomainError(InvalidArgumentError):
    """A functional was evaluated outside the region where it is defined."""


class BracketError(SpinGlassError, ValueError):
    """A root bracket does not contain a sign change."""


class NoSolutionError(SpinGlassError):
    """The requested stationary point or branch does not exist."""


class ConvergenceError(SpinGlassError):
    """An iterative solver failed to reach its tolerance."""


class CapabilityError(SpinGlassError):
    """The request exceeds what an exact method can handle (e.g. size limits)."""


class GridError(SpinGlassError, ValueError):
    """A discretization grid is too small for the requested computation."""


class TruncationError(SpinGlassError):
    """A truncated sampler leaves too much mass outside the truncation."""
