"""errors.py — exception hierarchy shared by every module"""


class ThinningError(ValueError):
    """Root of every domain error raised by the toolkit."""


class DomainError(ThinningError):
    """A parameter lies outside its mathematical domain."""


class InvalidAcfError(ThinningError):
    """Autocorrelation input that cannot define a positive asymptotic variance."""


class ZeroSampleError(ThinningError):
    """The budget does not buy a single thinned sample."""


class OptimumTooExpensiveError(ThinningError):
    """The bracketing search needs more candidates than the configured limit."""


class KCapTooSmallError(ThinningError):
    """A band search reached its k cap, so the result may be truncated."""


class TraceFormatError(ThinningError):
    """A trace file that is not a single column of numbers."""
