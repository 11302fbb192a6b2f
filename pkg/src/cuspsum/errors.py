"""Exception hierarchy shared by every module.

The CLI maps :class:`CuspsumError` subclasses to exit code 2 and
:class:`IdentityCheckFailed` to exit code 3.
"""


class CuspsumError(Exception):
    """Base class for all library errors."""


class PoleError(CuspsumError, ValueError):
    """Evaluation requested at a pole of a meromorphic function."""


class DomainError(CuspsumError, ValueError):
    """Argument lies outside the region where the evaluation is supported."""


class UnsupportedWeightError(CuspsumError, ValueError):
    pass


class ResourceLimitError(CuspsumError):
    """Request exceeds a runtime policy bound (e.g. exact path size)."""


class TruncationMismatchError(CuspsumError, ValueError):
    pass


class WeightMismatchError(CuspsumError, ValueError):
    pass


class InsufficientCoefficientsError(CuspsumError, ValueError):
    pass


class PreconditionError(CuspsumError, ValueError):
    pass


class QuadratureError(CuspsumError):
    """Integrand failed the decay check at the height cutoff."""


class DegenerateFitError(CuspsumError):
    pass


class CacheError(CuspsumError):
    pass


class ChecksumError(CacheError):
    pass


class CacheVersionError(CacheError):
    pass


class TruncatedFileError(CacheError):
    pass


class InsufficientCacheError(CacheError):
    pass


class IdentityCheckFailed(CuspsumError):
    """A numerical identity did not hold to the requested tolerance."""

    def __init__(self, message: str, envelope=None):
        super().__init__(message)
        self.envelope = envelope
