"""Bulk computation: segmented sieves for mu / f / h, exact summatory series,
the divisor-hyperbola evaluation of the f-sum, and growth-exponent fitting.

Dense tables come from numpy segment sieves.  The coefficients h are sparse
(supported on n = d * m^2 with d composed of primes of q), so their partial
sums are computed exactly from an explicit event list: every pair (d, m)
with d*m^2 <= limit contributes mu(m) at n = d*m^2.  That list has only
O(sqrt(limit)) entries, which makes partial sums of h and |h| cheap at any
scale the dense sieves can reach, and it is what the hyperbola identity

    sum_{n<=x} f(n) = S1 + S2 - S3,
    S1 = sum_{d<=D} chi(d) * H(x/d),      H(y) = sum_{m<=y} h(m),
    S2 = sum_{m<=M} h(m) * C(x/m),        C(y) = sum_{d<=y} chi(d),
    S3 = sum_{d<=D, m<=M, dm<=x} chi(d) h(m),

consumes for its cached H values.  The identity is exact for any integer
split with D*M >= x because each region carries the constraint dm <= x.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arith import RealCharacter, prime_divisors
from .errors import CapacityError, InsufficientDataError, RangeTooLargeError

__all__ = [
    "FunctionTable",
    "SummatorySeries",
    "HyperbolaSplit",
    "GrowthEnvelope",
    "primes_upto",
    "mobius_block",
    "sieve_segment",
    "summatory_direct",
    "summatory_hyperbola",
    "abs_h_sum",
    "count_q_smooth",
    "q_smooth_numbers",
    "growth_fit",
    "checkpoint_grid",
    "vk_envelope",
]

MAX_RANGE = 10**12
DEFAULT_SEGMENT = 1 << 22
MAX_SEGMENT_SPAN = 1 << 26

TABLE_KINDS = ("mobius", "f", "h")
SERIES_KINDS = ("mobius", "f", "h", "abs_h", "char_sum")


@dataclass
class FunctionTable:
    """Dense values of one pointwise function over [start, stop)."""

    kind: str
    start: int
    stop: int
    values: np.ndarray
    q: int | None = None
    char_id: int | None = None

    def value_at(self, n: int) -> int:
        if not self.start <= n < self.stop:
            raise IndexError(f"{n} outside [{self.start}, {self.stop})")
        return int(self.values[n - self.start])


@dataclass
class SummatorySeries:
    """Exact partial sums of one function at an increasing checkpoint grid.

    ``extremes`` optionally records, per exponent alpha, the supremum of
    |partial sum at x| / x^alpha over every integer x up to the last
    checkpoint, together with its argmax (not just over the checkpoints).
    """

    kind: str
    checkpoints: tuple[int, ...]
    sums: tuple[int, ...]
    method: str = "direct"
    q: int | None = None
    char_id: int | None = None
    extremes: dict[float, tuple[float, int]] = field(default_factory=dict)

    def sum_at(self, x: int) -> int:
        return self.sums[self.checkpoints.index(x)]


@dataclass(frozen=True)
class HyperbolaSplit:
    """Integer split parameters for the hyperbola identity; needs d_max*m_max >= x."""

    x: int
    d_max: int
    m_max: int

    def __post_init__(self):
        if self.x < 1 or self.d_max < 1 or self.m_max < 1:
            raise ValueError("x, d_max, m_max must all be >= 1")
        if self.d_max * self.m_max < self.x:
            raise ValueError("invalid split: need d_max * m_max >= x")

    @classmethod
    def default(cls, x: int) -> "HyperbolaSplit":
        """m_max = ceil(x^(2/3)), the balance point of the two partial sums."""
        m = max(1, round(x ** (2 / 3)))
        while m**3 < x * x:  # correct float rounding: smallest m with m^3 >= x^2
            m += 1
        while m > 1 and (m - 1) ** 3 >= x * x:
            m -= 1
        d = -(-x // m)
        return cls(x, d, m)


@dataclass
class GrowthEnvelope:
    """Least-squares exponent fit of log|sum| against log x, plus a sup statistic."""

    exponent: float
    constant: float
    sup_quarter: float
    sup_quarter_at: int
    log_power: float | None = None
    vk_c: float | None = None


# ---------------------------------------------------------------------------
# primes and dense blocks


_PRIME_CACHE: dict[str, np.ndarray] = {}


def primes_upto(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (cached, grows monotonically)."""
    cached = _PRIME_CACHE.get("primes")
    if cached is not None and _PRIME_CACHE["limit"] >= n:
        return cached[: np.searchsorted(cached, n, side="right")]
    limit = max(n, 1 << 16)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    primes = np.nonzero(mask)[0].astype(np.int64)
    _PRIME_CACHE["primes"] = primes
    _PRIME_CACHE["limit"] = limit
    return primes[: np.searchsorted(primes, n, side="right")]


def _first_multiple(start: int, p: int) -> int:
    return -(-start // p) * p


def mobius_block(start: int, stop: int) -> np.ndarray:
    """mu(n) for n in [start, stop) as int8, by least-prime-factor marking.

    Each prime p <= sqrt(stop-1) flips the sign of its multiples once and
    divides them out of a running cofactor; multiples of p^2 are zeroed.
    Entries whose cofactor exceeds 1 at the end contain exactly one prime
    factor above the sieving bound and get one more sign flip.
    """
    if not 1 <= start < stop:
        raise ValueError("need 1 <= start < stop")
    n = stop - start
    mu = np.ones(n, dtype=np.int8)
    rem = np.arange(start, stop, dtype=np.int64)
    for p in primes_upto(math.isqrt(stop - 1)):
        p = int(p)
        lo = _first_multiple(start, p)
        if lo >= stop:
            continue
        sl = slice(lo - start, None, p)
        mu[sl] = -mu[sl]
        rem[sl] //= p
        p2 = p * p
        lo2 = _first_multiple(start, p2)
        if lo2 < stop:
            mu[lo2 - start :: p2] = 0
    big = rem > 1
    mu[big] = -mu[big]
    return mu


def _f_block(chi: RealCharacter, start: int, stop: int) -> np.ndarray:
    """f(n) = mu(n)^2 * g_chi(n) for n in [start, stop) as int8."""
    mu = mobius_block(start, stop)
    red = np.arange(start, stop, dtype=np.int64)
    for p in prime_divisors(chi.q):
        lo = _first_multiple(start, p)
        if lo < stop:
            red[lo - start :: p] //= p
        # squarefree entries contain p at most once; others are masked anyway
    table = np.array(chi.values, dtype=np.int8)
    out = table[red % chi.q]
    out[mu == 0] = 0
    return out


# ---------------------------------------------------------------------------
# q-smooth numbers and the sparse event list for h


def q_smooth_numbers(q: int, limit: int) -> np.ndarray:
    """Sorted integers d <= limit all of whose prime divisors divide q."""
    if limit < 1:
        return np.empty(0, dtype=np.int64)
    out = [1]
    for p in prime_divisors(q):
        extended = []
        for d in out:
            v = d
            while v <= limit:
                extended.append(v)
                v *= p
        out = extended
    return np.array(sorted(out), dtype=np.int64)


def count_q_smooth(q: int, x: int) -> int:
    """Exact count of q-smooth integers <= x (bounded DFS over exponents)."""
    if x < 1:
        raise ValueError("x must be >= 1")
    primes = prime_divisors(q)

    def rec(i: int, prod: int) -> int:
        if i == len(primes):
            return 1
        total = 0
        v = prod
        while v <= x:
            total += rec(i + 1, v)
            v *= primes[i]
        return total

    return rec(0, 1)


_H_CACHE: dict[int, tuple[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = {}


def _h_tables(q: int, limit: int):
    """Support points n <= limit with h(n) != 0, their values, and cumsums.

    Returns (ns, hs, cum_h, cum_abs): strictly increasing support ``ns``,
    aggregated values ``hs``, and prefix sums of h and |h| over the support.
    Cached per q and rebuilt only when a larger limit is requested.
    """
    cached = _H_CACHE.get(q)
    if cached is not None and cached[0] >= limit:
        _, ns, hs, cum, cumabs = cached
        hi = int(np.searchsorted(ns, limit, side="right"))
        return ns[:hi], hs[:hi], cum[:hi], cumabs[:hi]
    root = math.isqrt(limit)
    mu = mobius_block(1, root + 2)
    chunks_n = []
    chunks_w = []
    for d in q_smooth_numbers(q, limit):
        d = int(d)
        mmax = math.isqrt(limit // d)
        if mmax < 1:
            continue
        ms = np.arange(1, mmax + 1, dtype=np.int64)
        w = mu[: mmax].astype(np.int64)
        keep = w != 0
        chunks_n.append(d * ms[keep] * ms[keep])
        chunks_w.append(w[keep])
    ns = np.concatenate(chunks_n)
    ws = np.concatenate(chunks_w)
    order = np.argsort(ns, kind="stable")
    ns = ns[order]
    ws = ws[order]
    uniq, idx = np.unique(ns, return_index=True)
    sums = np.add.reduceat(ws, idx)
    keep = sums != 0
    uniq, sums = uniq[keep], sums[keep]
    cum = np.cumsum(sums)
    cumabs = np.cumsum(np.abs(sums))
    _H_CACHE[q] = (limit, uniq, sums, cum, cumabs)
    return uniq, sums, cum, cumabs


def _h_partial_sums(q: int, xs: np.ndarray, limit: int) -> np.ndarray:
    """H(x) = sum_{m<=x} h(m) for each x in xs (vectorized lookup)."""
    ns, _, cum, _ = _h_tables(q, limit)
    idx = np.searchsorted(ns, xs, side="right")
    return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0)


def _h_block(q: int, start: int, stop: int) -> np.ndarray:
    """Dense h values over [start, stop) as int64, scattered from the event list."""
    ns, hs, _, _ = _h_tables(q, stop - 1)
    lo = np.searchsorted(ns, start, side="left")
    hi = np.searchsorted(ns, stop - 1, side="right")
    out = np.zeros(stop - start, dtype=np.int64)
    out[ns[lo:hi] - start] = hs[lo:hi]
    return out


# ---------------------------------------------------------------------------
# public sieve API


def sieve_segment(
    kind: str,
    start: int,
    stop: int,
    *,
    q: int | None = None,
    chi: RealCharacter | None = None,
    char_id: int | None = None,
    max_span: int = MAX_SEGMENT_SPAN,
) -> FunctionTable:
    """Exact values of mu, f, or h over the half-open interval [start, stop)."""
    if kind not in TABLE_KINDS:
        raise ValueError(f"unknown table kind {kind!r}")
    if not 1 <= start < stop <= MAX_RANGE:
        raise ValueError(f"bad interval [{start}, {stop})")
    if stop - start > max_span:
        raise RangeTooLargeError(f"segment span {stop - start} exceeds {max_span}")
    if kind == "mobius":
        values = mobius_block(start, stop)
    elif kind == "f":
        if chi is None:
            raise ValueError("kind 'f' needs a character")
        q = chi.q
        values = _f_block(chi, start, stop)
    else:
        if q is None:
            raise ValueError("kind 'h' needs the modulus q")
        values = _h_block(q, start, stop)
    return FunctionTable(kind, start, stop, values, q=q, char_id=char_id)


def _validate_checkpoints(checkpoints) -> tuple[int, ...]:
    cps = tuple(int(x) for x in checkpoints)
    if not cps:
        raise ValueError("need at least one checkpoint")
    if any(b <= a for a, b in zip(cps, cps[1:])) or cps[0] < 1:
        raise ValueError("checkpoints must be strictly increasing and >= 1")
    if cps[-1] > MAX_RANGE:
        raise CapacityError(f"checkpoint {cps[-1]} exceeds supported range {MAX_RANGE}")
    return cps


def _segment_bounds(x_max: int, segment_size: int) -> list[tuple[int, int]]:
    return [(a, min(a + segment_size, x_max + 1)) for a in range(1, x_max + 1, segment_size)]


def _block_values(kind: str, q, chi, start: int, stop: int) -> np.ndarray:
    if kind == "mobius":
        return mobius_block(start, stop)
    return _f_block(chi, start, stop)


def _scan_block(cs: np.ndarray, start: int, alphas, extremes: dict) -> None:
    xs = np.arange(start, start + len(cs), dtype=np.float64)
    ratios_abs = np.abs(cs).astype(np.float64)
    for alpha in alphas:
        r = ratios_abs / xs**alpha
        i = int(np.argmax(r))
        best = (float(r[i]), start + i)
        if alpha not in extremes or best[0] > extremes[alpha][0]:
            extremes[alpha] = best


def summatory_direct(
    kind: str,
    checkpoints,
    *,
    q: int | None = None,
    chi: RealCharacter | None = None,
    char_id: int | None = None,
    segment_size: int = DEFAULT_SEGMENT,
    threads: int = 1,
    track_extremes: tuple[float, ...] = (),
) -> SummatorySeries:
    """Exact partial sums at each checkpoint via a streaming segmented sieve.

    Memory is bounded by the segment size regardless of the final
    checkpoint.  With ``threads`` > 1 disjoint segments are sieved
    concurrently and reduced in checkpoint order, so the output is
    identical to the sequential one.
    """
    cps = _validate_checkpoints(checkpoints)
    if kind not in SERIES_KINDS:
        raise ValueError(f"unknown series kind {kind!r}")
    x_max = cps[-1]

    if kind in ("h", "abs_h"):
        if q is None:
            raise ValueError(f"kind {kind!r} needs the modulus q")
        ns, _, cum, cumabs = _h_tables(q, x_max)
        idx = np.searchsorted(ns, np.array(cps, dtype=np.int64), side="right")
        src = cumabs if kind == "abs_h" else cum
        sums = tuple(int(src[i - 1]) if i > 0 else 0 for i in idx)
        return SummatorySeries(kind, cps, sums, q=q, char_id=char_id)

    if kind == "char_sum":
        if chi is None:
            raise ValueError("kind 'char_sum' needs a character")
        from .arith import char_partial_sum

        sums = tuple(char_partial_sum(chi, x) for x in cps)
        return SummatorySeries(kind, cps, sums, q=chi.q, char_id=char_id)

    if kind == "f":
        if chi is None:
            raise ValueError("kind 'f' needs a character")
        q = chi.q

    segments = _segment_bounds(x_max, segment_size)
    primes_upto(math.isqrt(x_max))  # warm shared cache before any worker starts
    if kind == "f":
        prime_divisors(chi.q)
    extremes: dict[float, tuple[float, int]] = {}
    sums_at: dict[int, int] = {}

    if threads <= 1:
        offset = 0
        for a, b in segments:
            vals = _block_values(kind, q, chi, a, b)
            cs = offset + np.cumsum(vals, dtype=np.int64)
            for x in cps:
                if a <= x < b:
                    sums_at[x] = int(cs[x - a])
            if track_extremes:
                _scan_block(cs, a, track_extremes, extremes)
            offset = int(cs[-1])
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            totals = list(
                pool.map(
                    lambda seg: int(
                        _block_values(kind, q, chi, *seg).sum(dtype=np.int64)
                    ),
                    segments,
                )
            )
            offsets = [0]
            for t in totals[:-1]:
                offsets.append(offsets[-1] + t)

            def work(args):
                (a, b), offset = args
                vals = _block_values(kind, q, chi, a, b)
                cs = offset + np.cumsum(vals, dtype=np.int64)
                local = {x: int(cs[x - a]) for x in cps if a <= x < b}
                ext: dict[float, tuple[float, int]] = {}
                if track_extremes:
                    _scan_block(cs, a, track_extremes, ext)
                return local, ext

            for local, ext in pool.map(work, zip(segments, offsets)):
                sums_at.update(local)
                for alpha, best in ext.items():
                    if alpha not in extremes or best[0] > extremes[alpha][0]:
                        extremes[alpha] = best

    series = SummatorySeries(
        kind,
        cps,
        tuple(sums_at[x] for x in cps),
        q=q,
        char_id=char_id,
        extremes=extremes,
    )
    return series


def summatory_hyperbola(
    chi: RealCharacter,
    x: int,
    split: HyperbolaSplit | None = None,
    *,
    chunk: int = 1 << 22,
) -> int:
    """Exact f-sum at x through the three-region hyperbola identity.

    Agrees with the direct sieve for every valid split; the split only
    redistributes work.  S1 walks d <= D against cached partial sums of h,
    S2 and S3 walk the sparse support of h against O(q) character sums.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    if x > 10**10:
        raise CapacityError("hyperbola evaluation capped at x = 10^10")
    split = split or HyperbolaSplit.default(x)
    if split.x != x:
        raise ValueError("split was built for a different x")
    q = chi.q
    pre = np.array(chi.prefix_sums(), dtype=np.int64)
    table = np.array(chi.values, dtype=np.int64)

    ns, hs, _, _ = _h_tables(q, x)

    s1 = 0
    for lo in range(1, split.d_max + 1, chunk):
        hi = min(lo + chunk, split.d_max + 1)
        ds = np.arange(lo, hi, dtype=np.int64)
        hsum = _h_partial_sums(q, x // ds, x)
        s1 += int(np.dot(table[ds % q], hsum))

    sel = ns <= split.m_max
    ms = ns[sel]
    ws = hs[sel]
    s2 = int(np.dot(ws, pre[(x // ms) % q]))
    capped = np.minimum(split.d_max, x // ms)
    s3 = int(np.dot(ws, pre[capped % q]))
    return s1 + s2 - s3


def abs_h_sum(q: int, checkpoints, *, char_id: int | None = None) -> SummatorySeries:
    """Exact partial sums of |h| (monotone nondecreasing)."""
    return summatory_direct("abs_h", checkpoints, q=q, char_id=char_id)


# ---------------------------------------------------------------------------
# growth fitting and checkpoint grids


def growth_fit(series: SummatorySeries, window: tuple[int, int] | None = None) -> GrowthEnvelope:
    """Ordinary least squares of log|sum| on log x over usable checkpoints.

    Checkpoints with a zero sum carry no information about the exponent and
    are skipped; at least 10 must remain.  Also reports the supremum of
    |sum| / x^(1/4) over the (windowed) checkpoints with its argmax.
    """
    xs = np.array(series.checkpoints, dtype=np.float64)
    ss = np.array(series.sums, dtype=np.float64)
    mask = np.ones(len(xs), dtype=bool)
    if window is not None:
        lo, hi = window
        mask &= (xs >= lo) & (xs <= hi)
    if not mask.any():
        raise InsufficientDataError("window contains no checkpoints")
    usable = mask & (np.abs(ss) >= 1)
    if usable.sum() < 10:
        raise InsufficientDataError(
            f"need >= 10 checkpoints with nonzero sums, have {int(usable.sum())}"
        )
    slope, intercept = np.polyfit(np.log(xs[usable]), np.log(np.abs(ss[usable])), 1)
    ratios = np.abs(ss[mask]) / xs[mask] ** 0.25
    i = int(np.argmax(ratios))
    return GrowthEnvelope(
        exponent=float(slope),
        constant=float(math.exp(intercept)),
        sup_quarter=float(ratios[i]),
        sup_quarter_at=int(xs[mask][i]),
    )


def checkpoint_grid(x_max: int, extras=()) -> tuple[int, ...]:
    """Geometric grid with ratio 10^(1/8) from 100 up to x_max, plus extras.

    x_max itself is always included, so a toy range below 100 still yields
    one checkpoint.
    """
    if x_max < 1:
        raise ValueError("x_max must be >= 1")
    pts = {int(x_max)}
    k = 0
    while True:
        v = round(100 * 10 ** (k / 8))
        if v > x_max:
            break
        pts.add(v)
        k += 1
    pts.update(int(e) for e in extras if 1 <= int(e) <= x_max)
    return tuple(sorted(pts))


def vk_envelope(x: float, c: float) -> float:
    """exp(-c (log x)^(3/5) / (log log x)^(1/5)), the report-only envelope column.

    Defined for x > e so the inner logarithm is positive; smaller x report 1.
    """
    if x <= math.e:
        return 1.0
    lx = math.log(x)
    llx = math.log(lx)
    if llx <= 0:
        return 1.0
    return math.exp(-c * lx**0.6 / llx**0.2)
