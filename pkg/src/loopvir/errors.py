"""Exception types shared across the package."""


class LoopVirError(Exception):
    """Base class for errors raised by this package."""


class DomainError(LoopVirError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class CutoffMismatchError(LoopVirError, ValueError):
    """Two polynomials with different coordinate cutoffs were combined."""


class TruncationError(LoopVirError, ValueError):
    """A coefficient beyond the provable truncation order was requested.

    Raised instead of ever returning a silently wrong value; the message
    states the minimal order or cutoff that would make the request exact.
    """


class NotInvertibleError(LoopVirError, ValueError):
    """A ring element (or series leading coefficient) has no inverse."""
