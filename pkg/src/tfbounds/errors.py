"""Exception hierarchy.

Input problems derive from :class:`InputError` (also a ``ValueError``) and
numerical guards from :class:`NumericalGuard`; the command line maps them to
exit codes 2 and 3 respectively.
"""


class TfBoundsError(Exception):
    """Base class of every error raised by the package."""


class InputError(TfBoundsError, ValueError):
    """Arguments are malformed or violate an operation's precondition."""


class NumericalGuard(TfBoundsError):
    """A requested computation exceeds what the discretization can represent."""


class NonGridShift(InputError):
    """Shift or evaluation point is off-grid and the signal has no analytic tag."""


class MidpointUnavailable(NonGridShift):
    """Half-grid values are needed but cannot be produced."""


class GridMismatch(InputError):
    """Operands live on incompatible grids."""


class ZeroWindow(InputError):
    """The analysis window vanishes identically."""


class NonSquareGrid(InputError):
    """A square phase-space grid is required."""


class ProbeOutOfRange(InputError):
    """A probe point falls outside the sampled region."""


class NonPositiveLambda(InputError):
    """A dilation parameter must be strictly positive."""


class ExponentOutOfRange(InputError):
    """An exponent is outside the admissible range."""


class ExponentOrder(InputError):
    """The convolution route requires p <= q."""


class InfinitePowerPath(InputError):
    """p = infinity cannot be raised to a power; use the supremum route."""


class NegativeWeightOrder(InputError):
    """The weight order s must be nonnegative."""


class EmptyFamily(InputError):
    """The test family used for a lower bound is too small."""


class TauHalf(InputError):
    """The tau-kernel is undefined at tau = 1/2."""


class NonPositiveArgument(InputError):
    """The cosine integral is only defined here for t > 0."""


class IndexConditionViolated(InputError):
    """Exponents violate the index condition of the requested bound."""


class LatticeTooLarge(NumericalGuard):
    """A lattice exceeds the memory guard."""


class ResolutionInsufficient(NumericalGuard):
    """The requested parameter range needs a grid beyond the size cap."""
