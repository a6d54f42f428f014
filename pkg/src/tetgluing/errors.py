"""Exception types raised across the package."""


class GluingError(Exception):
    """Base class for all errors raised by tetgluing."""


class InvalidN(GluingError, ValueError):
    pass


class RetryLimitExceeded(GluingError):
    pass


class TooLarge(GluingError, ValueError):
    """Exhaustive enumeration requested for an intractable size."""


class UnknownFace(GluingError, KeyError):
    pass


class OddEulerCharacteristic(GluingError):
    """A closed orientable surface came out with odd Euler characteristic.

    This can only happen through a construction bug.
    """


class OrientationInconsistency(GluingError):
    """A chain complex failed the boundary-of-boundary check."""


class SizeLimitExceeded(GluingError):
    pass


class DisconnectedGraph(GluingError, ValueError):
    pass


class NoConvergence(GluingError):
    pass


class InsufficientData(GluingError, ValueError):
    pass


class ConservationViolation(GluingError):
    """A per-record identity failed; the run is aborted."""
