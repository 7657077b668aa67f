"""Exception types raised by the decomposition pipeline."""


class BikakError(ValueError):
    """Base class for all package errors."""


class NotSymmetric(BikakError):
    pass


class NoConvergence(BikakError):
    pass


class NotCommuting(BikakError):
    pass


class NotUnitary(BikakError):
    pass


class NotOrthogonal(BikakError):
    pass


class RealnessFailure(BikakError):
    """The AI step could not produce a real right factor within tolerance."""


class IndexOutOfRange(BikakError):
    pass


class ShapeTooSmall(BikakError):
    pass


class BadSplit(BikakError):
    pass


class SignReconciliationFailure(BikakError):
    """No consistent block/sign assignment satisfied the four block equations."""


class NotInSpan(BikakError):
    pass


class NotInSubgroup(BikakError):
    pass


class DimensionTooSmall(BikakError):
    pass


class NotSkewHermitian(BikakError):
    pass


class MissingGenerator(BikakError):
    pass


class ReconstructionFailure(BikakError):
    pass
