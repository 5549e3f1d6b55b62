"""Toolkit for multiplicative functions resembling the Mobius function.

Builds f = mu^2 * g_chi from a real non-principal Dirichlet character chi,
computes its summatory function exactly at scale by two independent methods
(streaming segmented sieve, and the divisor-hyperbola identity), evaluates
the associated Dirichlet series L(s,chi) P(s) / zeta(2s) and its truncation
tails numerically, scans for simple zeros of zeta(2s) on the quarter line,
and derives the residue-based lower-bound constant at non-cancelled zeros.
A CLI (``moblike``) drives reproducible experiments that emit CSV reports
and companion figures.
"""

from .arith import (
    Factorization,
    RealCharacter,
    char_partial_sum,
    enumerate_real_characters,
    f_value,
    factorize,
    g_chi,
    h_value,
    is_prime,
    mobius,
)
from .errors import (
    CancelledZeroError,
    CapacityError,
    ConfigError,
    InsufficientDataError,
    MoblikeError,
    PoleAtOneError,
    PoleOfFError,
    PoleOfPError,
    RangeTooLargeError,
    VerificationError,
)

__version__ = "0.1.0"
