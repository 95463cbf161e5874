"""Exception types raised by the gotd package."""


class GotdError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatch(GotdError):
    """Operands do not conform (wrong matrix or vector dimensions)."""


class RankDeficient(GotdError):
    """A matrix has numerical rank below the requested rank."""


class IllConditioned(GotdError):
    """A linear system is too ill-conditioned to solve reliably.

    For constraint Gram systems this signals a loss of the full-rank
    property of the constraint differential at the current point.
    """


class NotConverged(GotdError):
    """An iterative solver exhausted its budget without reaching tolerance."""


class DegenerateStep(GotdError):
    """A sparsity retraction target has fewer nonzeros than required."""


class DegenerateProjection(GotdError):
    """A metric projection onto a constraint set is undefined or non-unique."""


class DomainViolation(GotdError):
    """An input left the domain of a function (e.g. Lorentz products < 1)."""


class DimensionGuard(GotdError):
    """A dense code path was refused because the problem is too large for it."""


class InfeasibleSampling(GotdError):
    """Requested more samples than the population contains."""


class UsageError(GotdError):
    """Invalid command line or configuration input."""
