"""Exception hierarchy shared by every module of the package."""


class SineDistError(Exception):
    """Base class for all errors raised by sinedist."""


# linear algebra

class NotSquare(SineDistError, ValueError):
    pass


class NotHermitian(SineDistError, ValueError):
    pass


class NotPositive(SineDistError, ValueError):
    pass


class ConvergenceFailure(SineDistError, ArithmeticError):
    pass


class DimensionMismatch(SineDistError, ValueError):
    pass


class DimensionOverflow(SineDistError, ValueError):
    pass


class NonFiniteEntries(SineDistError, ValueError):
    pass


# states

class InvalidState(SineDistError, ValueError):
    """A density matrix or pure state violates one of its invariants."""


class ThetaOutOfRange(SineDistError, ValueError):
    pass


class BadRank(SineDistError, ValueError):
    pass


# channels

class InvalidChannel(SineDistError, ValueError):
    """Kraus operators whose effect operator leaves the interval [0, 1]."""


class InvalidPovm(SineDistError, ValueError):
    pass


class IndexOutOfRange(SineDistError, IndexError):
    pass


class DegeneratePair(SineDistError, ValueError):
    pass


class IterationCapTooSmall(UserWarning):
    """Emitted (not raised) when the purification search runs out of budget."""
