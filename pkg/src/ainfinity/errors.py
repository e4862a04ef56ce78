"""Exception hierarchy shared across the engine."""


class AInfinityError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(AInfinityError):
    """A construction parameter is outside its allowed range."""


class DimensionMismatch(AInfinityError):
    """Shapes of linear-algebra operands disagree."""


class TruncationTooShort(AInfinityError):
    """The resolution window does not reach far enough for the request."""


class NotACycle(AInfinityError):
    """A homology-level operation received an element with nonzero differential."""


class NotABoundary(AInfinityError):
    """A nullhomotopy was requested for an element with nonzero class."""


class NotPeriodic(AInfinityError):
    """Compaction was requested for a map that does not repeat with the period."""


class PsiNotCycle(AInfinityError):
    """An assembled obstruction failed its cycle check.

    This is a hard internal-consistency failure (sign or memo corruption),
    never a legitimate outcome of the computation.
    """


class CertificateMissing(AInfinityError):
    """Linear extension was requested without a valid periodicity or
    commutation certificate for the arities involved."""


class CommutationFailure(AInfinityError):
    """A freshly computed map component stopped commuting with the
    distinguished polynomial-class cocycle; the run cannot continue
    under the reduction."""


class UnresolvableValue(AInfinityError):
    """A structure value was requested outside the computed and certified
    range of the record."""
