"""Exception hierarchy shared by every package.

Domain violations (a point in the spectrum, a contour crossing it) are kept
apart from bad input and from numerical non-convergence so that callers, the
CLI in particular, can map each family to its own exit status.
"""
from __future__ import annotations


class SpectralError(Exception):
    """Base class for all errors raised by this project."""


class DimensionMismatchError(SpectralError, ValueError):
    pass


class InvalidTupleError(SpectralError, ValueError):
    pass


class InvalidStateError(SpectralError, ValueError):
    pass


class SingularPointError(SpectralError):
    """The requested point lies in, or numerically too close to, the spectrum."""


class ContourError(SingularPointError):
    pass


class StencilError(SingularPointError):
    pass


class ConvergenceError(SpectralError, RuntimeError):
    pass


class NotIsolatedError(SingularPointError):
    """The point is not an isolated eigenvalue, or the operator gives no handle on isolation at 0."""


class NonCommutingError(SpectralError, ValueError):
    pass
