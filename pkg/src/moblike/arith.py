"""Exact integer arithmetic: factorization, the Mobius function, real
Dirichlet characters, and the pointwise functions derived from them.

The central construction starts from a real non-principal Dirichlet
character chi mod q (completely multiplicative, q-periodic, zero exactly
off the units mod q, taking some value -1).  Three functions are built on
top of it:

* ``g_chi(n)``  -- the completely multiplicative extension of chi with the
  value at primes p | q replaced by 1, so it maps every n to +-1;
* ``f_value(n) = mu(n)^2 * g_chi(n)`` -- supported on squarefree integers,
  +-1 at every prime;
* ``h_value(n) = sum of mu(m) over factorizations n = d * m^2`` where every
  prime of d divides q.  These are the Dirichlet coefficients of
  (finite Euler product over p | q) / zeta(2s), and satisfy the exact
  convolution identity  f(n) = sum_{d | n} chi(d) h(n/d).

Everything here is a pure function over immutable values; bulk (sieved)
versions of mu, f and h live in :mod:`moblike.sieve`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

__all__ = [
    "Factorization",
    "RealCharacter",
    "is_prime",
    "factorize",
    "prime_divisors",
    "mobius",
    "enumerate_real_characters",
    "g_chi",
    "f_value",
    "h_value",
    "char_partial_sum",
]

MAX_N = 2**63 - 1

# Witnesses proving primality for every n < 3.3 * 10^24, hence for all int64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


@dataclass(frozen=True)
class Factorization:
    """Canonical decomposition n = p1^e1 * ... * pk^ek, primes increasing."""

    n: int
    factors: tuple[tuple[int, int], ...]

    @property
    def omega(self) -> int:
        """Number of distinct prime divisors."""
        return len(self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n <= 2^63 - 1."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """Brent-cycle Pollard rho; returns a nontrivial factor of composite odd n."""
    if n % 2 == 0:
        return 2
    for c in itertools.count(1):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
        # rare cycle degeneracy: retry with a different polynomial increment


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> Factorization:
    """Factor 1 <= n <= 2^63 - 1 by trial division + Pollard rho."""
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n out of range: {n}")
    m = n
    factors: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            factors[m] = factors.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.append(d)
        stack.append(m // d)
    return Factorization(n, tuple(sorted(factors.items())))


@lru_cache(maxsize=4096)
def prime_divisors(q: int) -> tuple[int, ...]:
    """Distinct primes dividing q, increasing."""
    return factorize(q).primes()


def mobius(n: int) -> int:
    """mu(n): (-1)^k on squarefree n with k prime factors, 0 otherwise."""
    fac = factorize(n)
    if not fac.is_squarefree:
        return 0
    return -1 if fac.omega % 2 else 1


@dataclass(frozen=True)
class RealCharacter:
    """A real non-principal Dirichlet character mod q, as a period table.

    ``values[a]`` is chi(n) for any n congruent to a mod q; entries lie in
    {-1, 0, +1} and vanish exactly when gcd(a, q) > 1.
    """

    q: int
    values: tuple[int, ...]

    def __call__(self, n: int) -> int:
        return self.values[n % self.q]

    def prefix_sums(self) -> tuple[int, ...]:
        """Partial sums chi(1) + ... + chi(r) for r = 0 .. q-1."""
        out = [0]
        for a in range(1, self.q):
            out.append(out[-1] + self.values[a])
        return tuple(out)


def _component_generators(p: int, e: int) -> tuple[list[int], dict[int, tuple[int, ...]]]:
    """Generator orders and discrete-log table for the units mod p^e.

    Returns (orders, logs) where logs maps each unit residue mod p^e to its
    exponent tuple over the listed generators.  The group is cyclic for odd
    p and for p^e in {2, 4}; for 2^e with e >= 3 it is generated by -1
    (order 2) and 3 (order 2^(e-2)).
    """
    pe = p**e
    if pe == 2:
        return [], {1: ()}
    if pe == 4:
        return [2], {1: (0,), 3: (1,)}
    if p == 2:
        half = 2 ** (e - 2)
        logs: dict[int, tuple[int, ...]] = {}
        for s in (0, 1):
            r = pe - 1 if s else 1
            for k in range(half):
                logs[r] = (s, k)
                r = r * 3 % pe
        return [2, half], logs
    phi = pe // p * (p - 1)
    ell_factors = prime_divisors(phi)
    g = 2
    while True:
        if math.gcd(g, p) == 1 and all(pow(g, phi // ell, pe) != 1 for ell in ell_factors):
            break
        g += 1
    logs = {}
    r = 1
    for k in range(phi):
        logs[r] = (k,)
        r = r * g % pe
    return [phi], logs


def enumerate_real_characters(q: int) -> list[RealCharacter]:
    """All real non-principal characters mod q, lexicographic by value table.

    The unit group mod q is split over the prime-power parts of q; a real
    character is a choice of sign for each cyclic generator, where -1 is
    only admissible on generators of even order.  The all-ones assignment
    (the principal character) is excluded.
    """
    if q < 3:
        raise ValueError("modulus must be >= 3")
    parts = factorize(q).factors
    moduli = [p**e for p, e in parts]
    orders: list[int] = []
    log_tables: list[dict[int, tuple[int, ...]]] = []
    for p, e in parts:
        ords, logs = _component_generators(p, e)
        orders.extend(ords)
        log_tables.append(logs)

    choices = [(1, -1) if d % 2 == 0 else (1,) for d in orders]
    tables: list[tuple[int, ...]] = []
    for signs in itertools.product(*choices):
        if all(s == 1 for s in signs):
            continue
        values = [0] * q
        for a in range(q):
            if math.gcd(a, q) != 1:
                continue
            v = 1
            pos = 0
            for pe, logs in zip(moduli, log_tables):
                for k in logs[a % pe]:
                    if k % 2 and signs[pos] == -1:
                        v = -v
                    pos += 1
            values[a] = v
        tables.append(tuple(values))
    tables.sort()
    return [RealCharacter(q, t) for t in tables]


def g_chi(chi: RealCharacter, n: int) -> int:
    """Completely multiplicative +-1 extension of chi.

    Strips from n every prime dividing q (where the extension takes the
    value 1) and evaluates chi on what remains, which is coprime to q.
    """
    if n < 1:
        raise ValueError("n must be positive")
    for p in prime_divisors(chi.q):
        while n % p == 0:
            n //= p
    return chi.values[n % chi.q]


def f_value(chi: RealCharacter, n: int) -> int:
    """mu(n)^2 * g_chi(n): zero off squarefree n, +-1 on it."""
    if not factorize(n).is_squarefree:
        return 0
    return g_chi(chi, n)


def _smooth_divisors(q: int, fac: Factorization) -> list[int]:
    """Divisors of fac.n composed only of primes dividing q."""
    divs = [1]
    qprimes = set(prime_divisors(q))
    for p, e in fac.factors:
        if p not in qprimes:
            continue
        divs = [d * p**b for d in divs for b in range(e + 1)]
    return divs


def h_value(q: int, n: int) -> int:
    """sum of mu(m) over factorizations n = d * m^2 with d composed of primes of q.

    Computed by enumerating the q-smooth divisors d of n and keeping those
    with n/d a perfect square; this point form is the test oracle for the
    bulk sieve.
    """
    if q < 3:
        raise ValueError("modulus must be >= 3")
    if n < 1:
        raise ValueError("n must be positive")
    fac = factorize(n)
    total = 0
    for d in _smooth_divisors(q, fac):
        m2 = n // d
        m = math.isqrt(m2)
        if m * m == m2:
            total += mobius(m)
    return total


def char_partial_sum(chi: RealCharacter, x: int) -> int:
    """Exact sum of chi(d) for 1 <= d <= x, in O(q) time.

    Every full period of a non-principal character sums to zero, so only
    the residual block x mod q contributes; the result is bounded by q.
    """
    if x < 0:
        raise ValueError("x must be >= 0")
    r = x % chi.q
    return sum(chi.values[a] for a in range(1, r + 1))
