"""Numerical complex-analytic layer.

Provides double-precision evaluators for

* zeta(s) by Euler-Maclaurin summation (about 10 + 2|t| direct terms and 12
  Bernoulli corrections, which keeps the truncation error far below the
  10^-10 relative target for |t| <= 100 and 10^-8 up to |t| <= 10^5);
* zeta'(s) by a central difference with one Richardson step;
* Gamma by the Lanczos approximation (g = 7, 9 coefficients), needed for
  the reflection-identity self-check and for the phase function of the
  rotated critical-line scan;
* L(s, chi) for a real non-principal character via the finite combination
  q^-s * sum_a chi(a) * hurwitz(s, a/q); the character sum cancels the
  Hurwitz pole, and s = 1 is handled by the explicitly cancelled form;
* the finite Euler product P(s) over primes dividing q, with pole
  detection on the imaginary axis;
* the quotient series F(s) = L(s,chi) P(s) / zeta(2s) and the truncation
  tail Z_M(s) = P(s)/zeta(2s) - sum_{m<=M} h(m) m^-s;
* a critical-line zero scanner (sign changes of the rotated real function,
  refined by bisection), per-zero non-cancellation checks against
  L(s, chi), the residue-based lower-bound constant
  |L(rho,chi) P(rho) / (4 rho zeta'(2 rho))| at a non-cancelled simple
  zero rho of zeta(2s), and an exact step-function Mellin cross-check of
  F against the partial sums of f.

All evaluators are pure functions; the zero scanner partitions its range
into independent sub-intervals, so results merge deterministically.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import RealCharacter, prime_divisors
from .errors import (
    CancelledZeroError,
    CapacityError,
    PoleAtOneError,
    PoleOfFError,
    PoleOfPError,
)
from .sieve import DEFAULT_SEGMENT, _f_block, _h_tables

__all__ = [
    "ZeroRecord",
    "TailSpec",
    "zeta",
    "zeta_prime",
    "gamma",
    "hurwitz_zeta",
    "dirichlet_l",
    "p_factor",
    "f_series",
    "z_m_tail",
    "theta",
    "hardy_z",
    "find_critical_zeros",
    "noncancelled_zeros",
    "omega_constant",
    "mellin_check",
    "reflection_residual",
    "zero_count_estimate",
]

_BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
    Fraction(854513, 138),
    Fraction(-236364091, 2730),
)
# B_{2k} / (2k)! as floats, k = 1 .. 12
_EM_COEF = tuple(float(b / math.factorial(2 * k)) for k, b in enumerate(_BERNOULLI, 1))

T_ENVELOPE = 1.0e5
ZETA_ZERO_TOL = 1e-10  # |zeta(2s)| below this signals an unusable denominator


def _em_n_terms(t: float) -> int:
    return max(16, 10 + 2 * math.ceil(abs(t)))


def _em_tail(s: complex, w: float) -> complex:
    """Euler-Maclaurin continuation terms for sum_{n >= W} (n + shift)^-s at w = W + shift."""
    acc = w ** (1 - s) / (s - 1) + 0.5 * w**-s
    prod = s
    power = w ** (-s - 1)
    w2 = w * w
    for k, coef in enumerate(_EM_COEF, 1):
        acc += coef * prod * power
        prod *= (s + 2 * k - 1) * (s + 2 * k)
        power /= w2
    return acc


def zeta(s: complex, *, n_terms: int | None = None) -> complex:
    """Riemann zeta by Euler-Maclaurin; valid on |t| <= 1e5, sigma > -23."""
    s = complex(s)
    if abs(s - 1) < 1e-12:
        raise PoleAtOneError("zeta has a pole at s = 1")
    if abs(s.imag) > T_ENVELOPE:
        raise CapacityError(f"|t| beyond validated envelope {T_ENVELOPE:g}")
    n = n_terms or _em_n_terms(s.imag)
    ks = np.arange(1, n)
    head = complex(np.exp(-s * np.log(ks)).sum())
    return head + _em_tail(s, float(n))


def _zeta_grid(ts: np.ndarray) -> np.ndarray:
    """zeta(1/2 + i t) for an array of heights, one shared term count."""
    n = _em_n_terms(float(np.max(np.abs(ts))))
    s = 0.5 + 1j * ts
    logk = np.log(np.arange(1, n, dtype=np.float64))
    head = np.exp(-s[:, None] * logk[None, :]).sum(axis=1)
    w = float(n)
    tail = w ** (1 - s) / (s - 1) + 0.5 * w**-s
    prod = s.copy()
    power = w ** (-s - 1)
    w2 = w * w
    for k, coef in enumerate(_EM_COEF, 1):
        tail += coef * prod * power
        prod = prod * (s + 2 * k - 1) * (s + 2 * k)
        power = power / w2
    return head + tail


def zeta_prime(s: complex, *, step: float = 1e-4) -> complex:
    """zeta'(s) by central differences with one Richardson extrapolation."""
    s = complex(s)
    if abs(s - 1) < 10 * step:
        raise PoleAtOneError("zeta' is evaluated too close to the pole at s = 1")
    d1 = (zeta(s + step) - zeta(s - step)) / (2 * step)
    d2 = (zeta(s + step / 2) - zeta(s - step / 2)) / step
    return (4 * d2 - d1) / 3


_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_TWO_PI = math.sqrt(2 * math.pi)


def gamma(z: complex) -> complex:
    """Gamma function, Lanczos g = 7 with reflection for Re z < 1/2."""
    z = complex(z)
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma(1 - z))
    z -= 1
    x = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], 1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_TWO_PI * t ** (z + 0.5) * cmath.exp(-t) * x


def _log_gamma_right(z: complex) -> complex:
    """log Gamma for Re z > 0, continuous along vertical lines at fixed Re z.

    The Lanczos series stays in the right half-plane on the lines used here,
    so the principal logarithms introduce no branch jumps.
    """
    z = complex(z) - 1
    x = _LANCZOS[0]
    for i, c in enumerate(_LANCZOS[1:], 1):
        x += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return 0.5 * math.log(2 * math.pi) + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def theta(t: float) -> float:
    """Phase that rotates zeta on the critical line to a real function."""
    return (_log_gamma_right(0.25 + 0.5j * t)).imag - 0.5 * t * math.log(math.pi)


def hardy_z(t: float) -> float:
    """Real rotated critical-line function; its sign changes bracket zeros."""
    return (cmath.exp(1j * theta(t)) * zeta(0.5 + 1j * t)).real


def hurwitz_zeta(s: complex, a: float, *, n_terms: int | None = None) -> complex:
    """Hurwitz zeta(s, a) = sum (n+a)^-s for 0 < a <= 1, continued as zeta."""
    s = complex(s)
    if not 0 < a <= 1:
        raise ValueError("shift must satisfy 0 < a <= 1")
    if abs(s - 1) < 1e-12:
        raise PoleAtOneError("hurwitz zeta has a pole at s = 1")
    n = n_terms or _em_n_terms(s.imag)
    ks = np.arange(0, n, dtype=np.float64) + a
    head = complex(np.exp(-s * np.log(ks)).sum())
    return head + _em_tail(s, float(n) + a)


def dirichlet_l(chi: RealCharacter, s: complex) -> complex:
    """L(s, chi) for a non-principal character; entire in s.

    Written as q^-s * sum_a chi(a) zeta(s, a/q).  The individual Hurwitz
    poles at s = 1 cancel because the character values sum to zero over a
    period; at s = 1 itself the cancelled form (with -log(N + a/q) in place
    of the singular term) is used.  Very close to s = 1 (within ~1e-6)
    accuracy degrades like |s-1|^-1 times machine epsilon.
    """
    s = complex(s)
    q = chi.q
    if abs(s - 1) < 1e-12:
        n = _em_n_terms(0.0)
        total = 0.0
        for a in range(1, q):
            cv = chi.values[a]
            if cv == 0:
                continue
            alpha = a / q
            w = n + alpha
            val = np.reciprocal(np.arange(0, n, dtype=np.float64) + alpha).sum()
            val += -math.log(w) + 0.5 / w
            power = w**-2.0
            for k, coef in enumerate(_EM_COEF, 1):
                # the rising product s(s+1)...(s+2k-2) collapses to (2k-1)! at s = 1
                val += coef * math.factorial(2 * k - 1) * power
                power /= w * w
            total += cv * val
        return complex(total / q)
    total = 0j
    for a in range(1, q):
        cv = chi.values[a]
        if cv:
            total += cv * hurwitz_zeta(s, a / q)
    return q**-s * total


def p_factor(q: int, s: complex) -> complex:
    """Finite Euler product over p | q: product of (1 - p^-s)^-1.

    Raises at its poles, which all lie on the imaginary axis at the points
    i*2*pi*j/log p; the pole at s = 0 has order equal to the number of
    distinct primes dividing q, the rest are simple.
    """
    s = complex(s)
    val = 1 + 0j
    for p in prime_divisors(q):
        d = 1 - cmath.exp(-s * math.log(p))
        if abs(d) < 1e-12:
            raise PoleOfPError(f"pole of the finite Euler product at s={s} (p={p})")
        val /= d
    return val


def f_series(chi: RealCharacter, s: complex) -> complex:
    """F(s) = L(s,chi) P(s) / zeta(2s); for sigma > 1 this is sum f(n) n^-s."""
    s = complex(s)
    if abs(2 * s - 1) < 1e-12:
        return 0j  # zeta(2s) pole makes the quotient vanish
    z2 = zeta(2 * s)
    if abs(z2) < ZETA_ZERO_TOL:
        raise PoleOfFError(f"zeta(2s) vanishes within tolerance at s={s}")
    return dirichlet_l(chi, s) * p_factor(chi.q, s) / z2


@dataclass(frozen=True)
class TailSpec:
    """Truncation-tail request: Z_M(s) with the series cut at m <= m_trunc.

    The coefficients h and the product P depend only on q; char_id is
    carried for report provenance only.
    """

    q: int
    m_trunc: int
    s: complex
    char_id: int | None = None

    def __post_init__(self):
        if self.m_trunc < 1:
            raise ValueError("truncation point must be >= 1")
        if self.m_trunc > 10**8:
            raise CapacityError("truncation point capped at 10^8")
        if complex(self.s).real <= 0.5:
            raise ValueError("tail is defined on the half-plane sigma > 1/2")


def z_m_tail(spec: TailSpec) -> complex:
    """Z_M(s) = P(s)/zeta(2s) - sum_{m<=M} h(m) m^-s, coefficients exact."""
    s = complex(spec.s)
    z2 = zeta(2 * s)
    if abs(z2) < ZETA_ZERO_TOL:
        raise PoleOfFError(f"zeta(2s) vanishes within tolerance at s={s}")
    analytic = p_factor(spec.q, s) / z2
    ns, hs, _, _ = _h_tables(spec.q, spec.m_trunc)
    if len(ns):
        partial = complex(np.sum(hs * np.exp(-s * np.log(ns.astype(np.float64)))))
    else:
        partial = 0j
    return analytic - partial


def zero_count_estimate(t: float) -> float:
    """Smooth main term of the zero-counting function up to height t."""
    if t <= 2 * math.pi * math.e:
        return 0.0
    return t / (2 * math.pi) * math.log(t / (2 * math.pi * math.e)) + 7 / 8


def find_critical_zeros(
    t_max: float,
    *,
    step: float = 0.02,
    zero_tol: float = 1e-8,
    deriv_threshold: float = 1e-4,
    refine_tol: float = 1e-12,
    threads: int = 1,
    dip_depth: float = 0.05,
) -> list[tuple[float, bool]]:
    """Ordinates g with zeta(1/2 + i g) = 0 and 0 < g <= 2 * t_max.

    A height 2*t_max is scanned so that every returned ordinate g yields a
    zero of zeta(2s) at s = 1/4 + i g/2 with g/2 <= t_max.  Sign changes of
    the rotated real function on a uniform grid are refined by bisection;
    grid intervals showing a deep dip of |Z| without a sign change are
    re-scanned at 20x resolution to catch close pairs.  Each zero is
    flagged simple when |zeta'| at it exceeds ``deriv_threshold``.
    Unresolved brackets are dropped with a warning rather than failing.
    """
    if t_max > 5000:
        raise CapacityError("zero scan capped at t_max = 5000")
    g_max = 2.0 * t_max
    lo = 0.05
    if g_max <= lo:
        return []
    n_pts = int((g_max - lo) / step) + 2
    grid = np.linspace(lo, lo + step * (n_pts - 1), n_pts)
    grid = grid[grid <= g_max + step]

    chunk = 2048

    def z_values(ts: np.ndarray) -> np.ndarray:
        th = np.array([theta(float(t)) for t in ts])
        zv = _zeta_grid(ts)
        return (np.exp(1j * th) * zv).real

    chunks = [grid[i : i + chunk] for i in range(0, len(grid), chunk)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            zs = np.concatenate(list(pool.map(z_values, chunks)))
    else:
        zs = np.concatenate([z_values(c) for c in chunks])

    brackets: list[tuple[float, float]] = []
    flips = np.nonzero(np.sign(zs[:-1]) * np.sign(zs[1:]) < 0)[0]
    for i in flips:
        brackets.append((float(grid[i]), float(grid[i + 1])))
    # deep |Z| dips without a flip: re-scan finer in case of a close pair
    small = np.nonzero((np.abs(zs[1:-1]) < dip_depth)
                       & (np.abs(zs[1:-1]) < np.abs(zs[:-2]))
                       & (np.abs(zs[1:-1]) < np.abs(zs[2:])))[0]
    for i in small:
        a, b = float(grid[i]), float(grid[i + 2])
        fine = np.linspace(a, b, 41)
        fz = z_values(fine)
        for j in np.nonzero(np.sign(fz[:-1]) * np.sign(fz[1:]) < 0)[0]:
            brackets.append((float(fine[j]), float(fine[j + 1])))

    zeros: list[tuple[float, bool]] = []
    for a, b in sorted(set(brackets)):
        za, zb = hardy_z(a), hardy_z(b)
        if za == 0.0:
            root = a
        elif zb == 0.0:
            root = b
        elif za * zb > 0:
            continue  # duplicate bracket from the fine re-scan
        else:
            while b - a > refine_tol:
                m = 0.5 * (a + b)
                zm = hardy_z(m)
                if zm == 0.0:
                    a = b = m
                    break
                if za * zm < 0:
                    b, zb = m, zm
                else:
                    a, za = m, zm
            root = 0.5 * (a + b)
        if not 0 < root <= g_max:
            continue
        if abs(zeta(0.5 + 1j * root)) > zero_tol:
            import warnings

            warnings.warn(f"unresolved bracket near t = {root:.6f}", stacklevel=2)
            continue
        simple = abs(zeta_prime(0.5 + 1j * root)) > deriv_threshold
        if zeros and abs(zeros[-1][0] - root) < 10 * refine_tol:
            continue
        zeros.append((root, simple))
    return zeros


@dataclass
class ZeroRecord:
    """One simple zero rho = 1/4 + i*gamma/2 of zeta(2s) with its evaluations.

    ``omega_constant`` is |L(rho,chi) P(rho) / (4 rho zeta'(2 rho))|, the
    lower-bound witness: when the zero is simple and L does not vanish
    there, the partial sums of f exceed that constant times x^(1/4) for
    arbitrarily large x.
    """

    gamma: float
    simple: bool
    l_value: complex
    p_value: complex
    zeta_prime: complex
    omega_constant: float
    noncancelled: bool

    @property
    def rho(self) -> complex:
        return 0.25 + 0.5j * self.gamma


def noncancelled_zeros(
    chi: RealCharacter,
    t_max: float,
    threshold: float = 1e-3,
    *,
    fd_step: float = 1e-4,
    **scan_kwargs,
) -> list[ZeroRecord]:
    """Evaluate L, P and zeta' at every scanned zero and flag non-cancellation.

    A zero is non-cancelled when |L(rho, chi)| exceeds ``threshold``;
    cancellation would require rho to be a zero of L as well, which never
    occurs at the heights scanned here but is checked numerically per zero
    rather than assumed.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    records = []
    for g, simple in find_critical_zeros(t_max, **scan_kwargs):
        rho = 0.25 + 0.5j * g
        lv = dirichlet_l(chi, rho)
        pv = p_factor(chi.q, rho)
        zp = zeta_prime(0.5 + 1j * g, step=fd_step)
        omega = abs(lv * pv / (4 * rho * zp)) if zp != 0 else 0.0
        records.append(
            ZeroRecord(
                gamma=g,
                simple=simple,
                l_value=lv,
                p_value=pv,
                zeta_prime=zp,
                omega_constant=omega,
                noncancelled=abs(lv) > threshold,
            )
        )
    return records


def omega_constant(record: ZeroRecord) -> float:
    """The x^(1/4) lower-bound witness constant of a usable zero record."""
    if not record.simple:
        raise CancelledZeroError("zero is not flagged simple")
    if not record.noncancelled:
        raise CancelledZeroError("zero is cancelled (|L| below threshold)")
    return record.omega_constant


def mellin_check(
    chi: RealCharacter,
    s: complex,
    x_max: int,
    *,
    segment_size: int = DEFAULT_SEGMENT,
) -> float:
    """|F(s) - s * integral_1^X of M_f(x) x^(-s-1) dx|, integral exact.

    The partial-sum function is a step function, so the integral is the
    finite sum of M_f(n) * (n^-s - (n+1)^-s) over n < X with no quadrature
    error; only the tail beyond X and the evaluator error of F remain.
    X = 1 gives an empty integral and the residual degenerates to |F(s)|.
    """
    s = complex(s)
    if s.real < 1.25:
        raise ValueError("cross-check restricted to sigma >= 1.25")
    if x_max > 10**8:
        raise CapacityError("integral range capped at 10^8")
    target = f_series(chi, s)
    acc = 0j
    offset = 0
    for a in range(1, x_max, segment_size):
        b = min(a + segment_size, x_max)
        cs = offset + np.cumsum(_f_block(chi, a, b), dtype=np.int64)
        ns = np.arange(a, b, dtype=np.float64)
        pw = np.exp(-s * np.log(ns))
        pw_next = np.exp(-s * np.log(ns + 1.0))
        acc += complex(np.sum(cs * (pw - pw_next)))
        offset = int(cs[-1])
    return abs(target - acc)


def reflection_residual(s: complex) -> float:
    """|zeta(s) - 2^s pi^(s-1) sin(pi s/2) Gamma(1-s) zeta(1-s)|."""
    s = complex(s)
    rhs = 2**s * math.pi ** (s - 1) * cmath.sin(math.pi * s / 2) * gamma(1 - s) * zeta(1 - s)
    return abs(zeta(s) - rhs)
