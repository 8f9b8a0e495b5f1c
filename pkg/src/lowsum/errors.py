"""Exception types raised by lowsum.

Every domain error derives from :class:`LowSumError` so the CLI can map them
to exit code 1 in one place.
"""


class LowSumError(ValueError):
    pass


class MalformedInput(LowSumError):
    pass


class InfeasibleZeroSum(LowSumError):
    pass


class InfeasibleKind(LowSumError):
    pass


class DimensionMismatch(LowSumError):
    pass


class DuplicateInPrefix(LowSumError):
    pass


class AlreadyPlaced(LowSumError):
    pass


class PrefixComplete(LowSumError):
    pass


class EpsilonOutOfRange(LowSumError):
    pass


class NotZeroSum(LowSumError):
    pass


class SameVertex(LowSumError):
    pass


class TooLarge(LowSumError):
    pass


class BadParameters(LowSumError):
    pass


class BadValue(LowSumError):
    pass


class PreconditionViolated(LowSumError):
    pass


class WitnessNotFound(LowSumError):
    """A balanced vertex was not found although the preconditions held.

    This indicates a bug, never a legitimate outcome.
    """


class TraceMismatch(LowSumError):
    pass
