"""Exception hierarchy shared across the package.

Three families map onto the CLI exit codes: parse failures (2), input
validation failures (3) and numeric/degeneracy failures (4).  Anything
else that escapes is a plain bug and exits with code 1.
"""


class SubsimplexError(Exception):
    """Base class for every error raised deliberately by this package."""

    exit_code = 1


class ParseError(SubsimplexError):
    """A CSV cell or file could not be parsed."""

    exit_code = 2


class ValidationError(SubsimplexError, ValueError):
    """Input violates a documented precondition or type invariant."""

    exit_code = 3


class NumericError(SubsimplexError, ArithmeticError):
    """A numeric degeneracy prevents the requested operation."""

    exit_code = 4


# --- validation family -------------------------------------------------

class NegativeEntry(ValidationError):
    """A composition entry is negative."""


class RowSumOutOfTolerance(ValidationError):
    """A row sum deviates from 1 by more than the admission tolerance."""


class NotInSimplex(ValidationError):
    """A point does not lie in the subsimplex spanned by the given vertices."""


class DegenerateVertices(ValidationError):
    """Vertex set is affinely dependent or not orthonormal as required."""


class RankZero(ValidationError):
    """A merge was requested on a rank-0 vertex set."""


class EmptyDataset(ValidationError):
    """The dataset has no rows, or fewer rows than the method requires."""


class DimensionMismatch(ValidationError):
    """Array shapes are inconsistent or the ambient dimension is too small."""


class OutOfSimplex(ValidationError):
    """A mode-of-variation parameter leaves the simplex."""


class OutOfOrthant(ValidationError):
    """A mode-of-variation parameter leaves the unit nonnegative orthant."""


class NonPositiveEntry(ValidationError):
    """Log-ratio transforms require strictly positive entries."""


class AllZeroMatrix(ValidationError):
    """Zero replacement needs at least one nonzero entry."""


class DimensionNotTwo(ValidationError):
    """Ternary rendering needs three-part compositions."""


# --- numeric family ----------------------------------------------------

class DegeneratePair(NumericError):
    """Both merge candidates carry zero mass in every sample."""


class DegenerateRatio(NumericError):
    """A vertex combination collapsed to the zero vector."""


class PoleSingularity(NumericError):
    """A spherical point is (anti)parallel to the removed direction."""
