"""Exception types raised across the package."""


class RHDeformError(Exception):
    """Base class for all package errors."""


class InvalidParameter(RHDeformError, ValueError):
    """An input value is outside its admissible range."""


class SingularStokesData(InvalidParameter):
    """The Stokes constants make 1 + s1*s2 vanish."""


class NoDecay(RHDeformError):
    """A jump on an unbounded arc does not approach the identity."""


class Unreachable(RHDeformError):
    """No path connects the requested terminals."""


class NotSplittable(RHDeformError):
    """A path cannot be used to split a graph."""


class OnWalk(RHDeformError):
    """The winding number is undefined for a point on the walk."""


class CrossingPaths(RHDeformError):
    """Two contour paths cross each other."""


class NoEnclosingWalk(RHDeformError):
    """No walk with the requested winding number exists."""


class ConditionTwoViolated(RHDeformError):
    """A deformation swept across the endpoint of another arc."""


class RecursionLimit(RHDeformError):
    """Shared-subpath improvement did not terminate."""

    def __init__(self, message: str, state: dict | None = None):
        super().__init__(message)
        self.state = state or {}


class SolverError(RHDeformError):
    """Base class for collocation failures."""


class AssemblyFailure(SolverError):
    """The collocation system could not be assembled."""


class SingularMatrix(SolverError):
    """The collocation matrix is numerically singular."""


class IllConditioned(SolverError):
    """The collocation matrix is too ill-conditioned to trust."""
