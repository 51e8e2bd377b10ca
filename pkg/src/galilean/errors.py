"""Exception types raised by the library.

Every error derives from :class:`GalileanError`, which is itself a
``ValueError`` so callers that only care about bad input can catch that.
"""


class GalileanError(ValueError):
    pass


class NotSkewSymmetric(GalileanError):
    pass


class MalformedAlgebraElement(GalileanError):
    pass


class AngleNearPi(GalileanError):
    """Rotation angle too close to pi for the logarithm to pick a branch."""


class JacobianSingular(GalileanError):
    pass


class ConvergenceFailure(GalileanError):
    pass


class NotPositiveSemidefinite(GalileanError):
    pass


class InsufficientSamples(GalileanError):
    pass


class DegenerateCovariance(GalileanError):
    pass


class NonPositiveDt(GalileanError):
    pass


class EmptyStream(GalileanError):
    pass


class NonMonotoneTimestamps(GalileanError):
    pass
