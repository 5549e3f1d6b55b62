"""Exception hierarchy shared across the package."""


class MoblikeError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(MoblikeError):
    """Invalid experiment configuration (unknown key, bad value, missing seed)."""


class CapacityError(MoblikeError):
    """A requested computation exceeds the supported range or memory budget."""


class RangeTooLargeError(CapacityError):
    """A sieve segment is wider than the configured maximum span."""


class VerificationError(MoblikeError):
    """An internal cross-check failed (two exact methods disagreed, etc.)."""


class InsufficientDataError(MoblikeError):
    """Too few usable checkpoints for an exponent fit."""


class PoleAtOneError(MoblikeError):
    """zeta(s) evaluated at its pole s = 1."""


class PoleOfPError(MoblikeError):
    """The finite Euler product over p | q evaluated at one of its poles."""


class PoleOfFError(MoblikeError):
    """The quotient series evaluated where zeta(2s) vanishes (within tolerance)."""


class CancelledZeroError(MoblikeError):
    """Lower-bound constant requested at a zero that is cancelled or not simple."""
